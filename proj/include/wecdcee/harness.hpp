// Two-time-scale closed loop: the plant advances at dt under the current PTO
// law while the high-level controller acts once every planning window T on
// windowed power measurements. Also the scenario file format, run metrics and
// CSV artifacts.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wecdcee/baseline_controllers.hpp"
#include "wecdcee/dcee_controller.hpp"
#include "wecdcee/wave_field.hpp"
#include "wecdcee/wave_estimator.hpp"
#include "wecdcee/wec_plant.hpp"

namespace wec {

enum class ControllerKind { kDcee, kEsc, kBangBang, kOracle, kNone };

const char* to_string(ControllerKind kind);
const char* to_string(PhaseAnchor anchor);
ControllerKind parse_controller(const std::string& name);

struct ScenarioConfig {
  WecParams plant;
  WaveField wave = reference_schedule();
  ControllerKind controller = ControllerKind::kDcee;
  MeasurementWindows windows;
  double dt = 0.01;           ///< s
  double duration = 40000.0;  ///< s
  std::uint64_t seed = 1;

  ConstraintRegion region;
  EstimatorConfig estimator;
  WavePrior prior;
  ActionConfig actions;
  DceeConfig dcee{default_p_max(ConstraintRegion{}, WecParams{})};
  EscConfig esc;
  PtoProfile initial_profile{0.0, 0.0, 1.56};

  /// Every n-th plant step is written to plant_trace.csv.
  std::size_t plant_trace_stride = 1;

  /// Throws ConfigError on any inconsistency.
  void validate() const;
};

/// Parses the `key = value` scenario format (see README). Unknown keys,
/// malformed numbers and missing wave definitions raise ConfigError.
ScenarioConfig parse_scenario(std::istream& in);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Writes a config back out in the same format; parse_scenario() of the
/// output reproduces the config.
void write_scenario(std::ostream& out, const ScenarioConfig& config);

/// Per high-level step controller diagnostics.
struct ControllerRecord {
  std::size_t step = 0;
  double time = 0.0;  ///< s, when the new command takes effect
  PtoProfile command;
  PtoGains gains;  ///< ESC only
  std::size_t selected = kZeroAction;
  double alpha = 1.0;
  CostTerms cost;
  WaveParams nominal;
  WaveParams spread;
  WaveParams true_wave;
  WindowedPower measured;
  double ess = 0.0;
};

struct SegmentMetrics {
  double start = 0.0;
  double end = 0.0;
  WaveParams wave;        ///< true (dominant) wave of the segment
  double feasible_optimum = 0.0;  ///< W
  double trailing_mean_power = 0.0;  ///< W, over the last 20% of the segment
  /// High-level steps after the segment start until the commanded frequency
  /// stays within 2 frequency steps of the wave's for the rest of the
  /// segment; -1 if it never settles.
  long convergence_step = -1;
};

struct RunMetrics {
  std::string controller;
  double duration = 0.0;
  std::size_t high_level_steps = 0;
  double mean_power = 0.0;           ///< W, whole run
  double trailing_mean_power = 0.0;  ///< W, last 20% of the run
  double energy = 0.0;               ///< J, sum of P * dt
  long convergence_step = -1;        ///< over the whole run, see SegmentMetrics
  std::size_t heave_violations = 0;
  std::size_t velocity_violations = 0;
  std::size_t filter_underflows = 0;
  double wall_seconds = 0.0;
};

struct RunResult {
  RunMetrics metrics;
  std::vector<SegmentMetrics> segments;
  std::vector<ControllerRecord> records;
};

struct RunOutputs {
  std::optional<std::filesystem::path> directory;  ///< no files when empty
};

RunResult run_scenario(const ScenarioConfig& config, const RunOutputs& outputs = {});

/// Runs every config (which must share plant, wave, windows, duration, dt and
/// seed) and returns their results in order. Writes comparison.csv when an
/// output directory is given.
std::vector<RunResult> compare_controllers(const std::vector<ScenarioConfig>& configs,
                                           const RunOutputs& outputs = {});

void write_metrics_csv(std::ostream& out, const RunResult& result);
void write_controller_trace_csv(std::ostream& out, const std::vector<ControllerRecord>& records);
void write_comparison_csv(std::ostream& out, const std::vector<RunResult>& results);

/// Mean of -F_u v over [0, duration] from the time-domain plant driven by a
/// harmonic wave and harmonic PTO force, after `preroll_periods` periods of
/// the slower harmonic to wash out the transient.
double simulated_average_power(const PtoProfile& profile, const WaveParams& wave,
                               const WecParams& plant, double duration, double dt,
                               double preroll_periods = 10.0);

struct SuiteReport {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double worst = 0.0;  ///< largest relative error or excess found
  std::vector<std::string> messages;

  [[nodiscard]] bool passed() const { return failures == 0; }
};

/// Closed form vs time-domain plant on seeded random (profile, wave) pairs.
SuiteReport validate_oracle_equivalence(std::size_t cases, std::uint64_t seed,
                                        double tolerance = 0.02);
/// Grid search around the analytic optimum never beats it.
SuiteReport validate_analytic_optimum(std::size_t cases, std::uint64_t seed);

}  // namespace wec
