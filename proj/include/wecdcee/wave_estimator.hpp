// Constrained bootstrap particle filter over the wave triple (A, B, omega),
// driven by windowed average-power measurements.
#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "wecdcee/energy_model.hpp"
#include "wecdcee/types.hpp"

namespace wec {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  [[nodiscard]] double width() const { return hi - lo; }
  [[nodiscard]] bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Box of admissible wave parameters. The phase interval is read on the
/// circle: a particle's phase is wrapped into [-pi, pi) before the test.
struct ConstraintRegion {
  Interval amplitude{0.0, 2.5};
  Interval phase{-2.0, 2.0};
  Interval omega{kFrequencyFloor, 2.5};

  [[nodiscard]] bool contains(const WaveParams& w) const;
  void validate() const;
};

struct EstimatorConfig {
  std::size_t particles = 5000;
  /// Resample when the effective sample size drops below this (N_T).
  double ess_threshold = 2500.0;
  /// Post-resampling jitter std per dimension, as a fraction of the
  /// constraint-region width. With adaptive roughening this is the cap.
  double roughening_fraction = 0.005;
  /// Scales the jitter to the weighted cloud's own spread (Gaussian-kernel
  /// bandwidth for N particles in 3 dimensions), between the floor below and
  /// the cap above. A surprising measurement restores the cap.
  bool adaptive_roughening = false;
  double roughening_floor_fraction = 2e-4;
  /// A measurement is surprising when even the best-fitting particle misses
  /// it by more than this many likelihood standard deviations; it forces a
  /// resample with the capped jitter.
  double surprise_threshold = 4.0;
  /// Also surprising: the update leaves fewer than this fraction of N as
  /// effective samples.
  double surprise_ess_fraction = 0.01;
  /// Fraction redrawn uniformly over the region on a surprising measurement,
  /// so a filter locked onto a wrong mode can find the right one.
  double surprise_regeneration_fraction = 0.1;
  /// Likelihood std = max(likelihood_fraction * |predicted|, likelihood_floor).
  double likelihood_fraction = 0.05;
  double likelihood_floor = 1e-3;
  /// Frequency jitter also shifts the phase so the jittered particle keeps
  /// its wave phase at the measurement time.
  bool couple_phase_jitter = true;
  /// Fraction of particles redrawn uniformly over the constraint region at
  /// each resampling, so abrupt sea-state changes can be re-acquired.
  double regeneration_fraction = 0.0;

  void validate() const;
};

/// Independent normal prior per dimension.
struct WavePrior {
  WaveParams mean{1.5, 1.0, 1.56};
  WaveParams stddev{0.5, 1.0, 0.3};
};

/// An averaging window [start, start + length] in absolute time.
struct MeasurementWindow {
  double start = 0.0;
  double length = 50.0;

  [[nodiscard]] double end() const { return start + length; }
};

struct UpdateDiagnostics {
  double ess = 0.0;
  /// Smallest standardised residual over the in-region particles.
  double surprise = 0.0;
  bool surprised = false;
  bool resampled = false;
  bool underflow = false;
};

/// Weighted particle approximation of the posterior over WaveParams.
class ParticleEnsemble {
 public:
  ParticleEnsemble() = default;
  ParticleEnsemble(std::vector<WaveParams> particles, std::vector<double> weights,
                   ConstraintRegion region, EstimatorConfig config, std::uint64_t seed);

  std::vector<WaveParams> particles;
  std::vector<double> weights;
  ConstraintRegion region;
  EstimatorConfig config;
  std::mt19937_64 rng;

  std::size_t update_count = 0;
  std::size_t resample_count = 0;
  std::size_t underflow_count = 0;
  std::size_t surprise_count = 0;
  UpdateDiagnostics last;

  [[nodiscard]] std::size_t size() const { return particles.size(); }
};

ParticleEnsemble init_ensemble(const WavePrior& prior, const EstimatorConfig& config,
                               const ConstraintRegion& region, std::uint64_t seed);

/// Gaussian log-likelihood of a measured window power given a prediction.
double log_likelihood(double measured, double predicted, const EstimatorConfig& config);

/// One pass of the filter: reweight by the likelihood of `measured` under the
/// profile that produced it, zero out-of-region particles, normalise, and
/// resample + roughen when the ESS drops below the threshold.
ParticleEnsemble update(ParticleEnsemble ensemble, double measured,
                        const PtoProfile& applied, const MeasurementWindow& window,
                        const WecParams& plant);

/// Three measurements over nested trailing windows, all ending at `end_time`.
struct CascadeMeasurements {
  double end_time = 0.0;
  double p_t1 = 0.0;
  double p_t2 = 0.0;
  double p_t = 0.0;
};

struct CascadeWindows {
  double t1 = 20.0;
  double t2 = 30.0;
  double t = 50.0;
};

/// Updates with the T1, T2 and T windows in that order, each posterior
/// feeding the next as its prior.
ParticleEnsemble cascade_update(ParticleEnsemble ensemble, const CascadeMeasurements& m,
                                const PtoProfile& applied, const CascadeWindows& windows,
                                const WecParams& plant);

/// Weighted mean per dimension; the phase uses the circular mean of the
/// particles' phases at `reference_time` (phase + omega * reference_time),
/// mapped back to the absolute-time convention. With a spread in omega the
/// absolute phases decorrelate as t grows, so callers averaging late in a
/// run should pass the time they care about.
WaveParams nominal_estimate(const ParticleEnsemble& ensemble, double reference_time = 0.0);
WaveParams nominal_estimate(std::span<const WaveParams> particles, double reference_time = 0.0);

/// Weighted std per dimension; the phase uses the circular std at
/// `reference_time`.
WaveParams posterior_std(const ParticleEnsemble& ensemble, double reference_time = 0.0);

double effective_sample_size(std::span<const double> weights);

/// Reweights by the likelihood of the power the nominal estimate (referenced
/// to the window start) predicts under `candidate`. No resampling, no
/// randomness; the input is untouched.
ParticleEnsemble hypothetical_update(const ParticleEnsemble& ensemble,
                                     const PtoProfile& candidate,
                                     const MeasurementWindow& window,
                                     const WecParams& plant);

/// Weighted sampling without replacement of `count` particles (returned
/// with implicit uniform weights), in draw order.
std::vector<WaveParams> downsample(const ParticleEnsemble& ensemble, std::size_t count,
                                   std::mt19937_64& rng);

/// Index form of downsample() over raw (not necessarily normalised) weights.
void sample_without_replacement(std::span<const double> weights, std::size_t count,
                                std::mt19937_64& rng, std::vector<double>& scratch,
                                std::vector<std::size_t>& out);

/// Indices chosen by systematic resampling of normalised weights.
std::vector<std::size_t> systematic_resample(std::span<const double> weights,
                                             std::mt19937_64& rng);

/// Reflects x into [lo, hi].
double reflect_into(double x, const Interval& range);

}  // namespace wec
