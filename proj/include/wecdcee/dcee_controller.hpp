// Dual controller for exploration and exploitation over the PTO profile.
//
// Each high-level step the controller refines its wave posterior with the
// three windowed power measurements, then scores 54 candidate profile
// increments by the expected squared gap to a reward anchor after a
// hypothetical Bayesian update, and commands the best one.
#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "wecdcee/wave_estimator.hpp"

namespace wec {

/// Admissible PTO profiles. A phase interval spanning a full turn is treated
/// as circular (wrapped), otherwise phases are clamped like the other axes.
struct ProfileBounds {
  Interval amplitude{0.0, 2.1e4};
  Interval phase{0.0, kTwoPi};
  Interval omega{0.1, 2.5};

  void validate() const;
};

PtoProfile clamp_profile(PtoProfile profile, const ProfileBounds& bounds);
bool within_bounds(const PtoProfile& profile, const ProfileBounds& bounds);

enum class GainDistribution {
  kUniform,     ///< alpha ~ U[alpha_min, alpha_max]
  kLogUniform,  ///< log alpha ~ U[log alpha_min, log alpha_max]
};

/// Where a frequency step leaves the commanded phase unchanged.
enum class PhaseAnchor {
  kAbsolute,  ///< nowhere: B_u is kept, so the phase at time t jumps by d_omega * t
  kSwitch,    ///< at the switch time, so the force is continuous
  kMidpoint,  ///< at the middle of the coming planning window
};

struct ActionConfig {
  double d_amplitude = 20.0;  ///< N
  double d_phase = 0.002;     ///< rad
  double d_omega = 0.0005;    ///< rad/s
  double alpha_min = 2.0;
  double alpha_max = 10.0;
  GainDistribution gain_distribution = GainDistribution::kUniform;
  ProfileBounds bounds;
  PhaseAnchor phase_anchor = PhaseAnchor::kAbsolute;

  void validate() const;
};

enum class ExplorationForm {
  kSubsample,  ///< unweighted spread over the Q-particle subsample
  kWeighted,   ///< sum_i (w_i (P_i - P_bar))^2 over the reweighted ensemble
};

struct DceeConfig {
  double p_max = 0.0;  ///< W; must exceed any achievable window power
  std::size_t m = 50;  ///< hypothetical measurements per candidate
  std::size_t q = 20;  ///< utility subsample size
  double horizon = 50.0;  ///< planning window T, s
  ExplorationForm form = ExplorationForm::kSubsample;
  /// Drops the exploration term from the cost when false (ablation).
  bool exploration = true;

  void validate(std::size_t particles) const;
};

/// 1.5x the optimal power at the largest admissible wave amplitude.
double default_p_max(const ConstraintRegion& region, const WecParams& plant);

struct ControllerState {
  PtoProfile current;
  ParticleEnsemble ensemble;
  std::size_t step_index = 0;
  std::mt19937_64 rng;
  double time = 0.0;  ///< start of the next planning window, s
};

struct Action {
  double d_amplitude = 0.0;
  double d_phase = 0.0;
  double d_omega = 0.0;
  bool scaled = false;

  [[nodiscard]] bool is_zero() const {
    return d_amplitude == 0.0 && d_phase == 0.0 && d_omega == 0.0;
  }
};

inline constexpr std::size_t kCandidateCount = 54;
inline constexpr std::size_t kZeroAction = 13;

/// The 27 sign combinations scaled by the step sizes, followed by the same 27
/// scaled again by `alpha`.
std::vector<Action> candidate_actions(const ActionConfig& config, double alpha);

/// Draws alpha from [alpha_min, alpha_max] and builds the set.
std::vector<Action> candidate_actions(const ActionConfig& config, std::mt19937_64& rng,
                                      double* alpha = nullptr);

/// current + action, clamped (phase wrapped) to the bounds. The new profile
/// takes effect at `switch_time` for `horizon` seconds; both only matter for
/// the phase anchor.
PtoProfile apply_action(const PtoProfile& current, const Action& action,
                        const ActionConfig& config, double switch_time, double horizon);

struct CostTerms {
  double exploitation = 0.0;
  double exploration = 0.0;

  [[nodiscard]] double total() const { return exploitation + exploration; }
};

/// Scores candidate profiles against one posterior snapshot. The M-particle
/// subsample is drawn once at construction and shared by every candidate, and
/// every candidate replays the same random stream for its Q-subsamples.
class CostEvaluator {
 public:
  CostEvaluator(const ParticleEnsemble& ensemble, double window_start,
                const DceeConfig& config, const WecParams& plant, std::mt19937_64& rng);

  [[nodiscard]] CostTerms evaluate(const PtoProfile& profile) const;
  [[nodiscard]] std::span<const std::size_t> hypothesis_indices() const { return hypotheses_; }

 private:
  const ParticleEnsemble& ensemble_;
  double window_start_;
  DceeConfig config_;
  WecParams plant_;
  std::vector<WaveParams> local_;  ///< particles re-referenced to window_start_
  std::vector<double> response_amplitude_;
  std::vector<double> response_phase_;
  std::vector<double> response_omega_;
  std::vector<double> log_weights_;
  std::vector<std::size_t> hypotheses_;
  std::uint64_t subsample_seed_;
};

/// Cost of one candidate increment (clamped to the bounds) from `state`.
CostTerms evaluate_cost(const Action& candidate, const ControllerState& state,
                        const DceeConfig& dcee, const ActionConfig& actions,
                        const WecParams& plant, std::mt19937_64& rng);

struct Selection {
  PtoProfile profile;
  std::size_t index = kZeroAction;
  double alpha = 1.0;
  std::vector<Action> candidates;
  std::vector<CostTerms> costs;
};

/// Index of the minimum total cost; the zero action wins ties, then the lowest
/// index.
std::size_t argmin_cost(std::span<const CostTerms> costs,
                        std::span<const Action> candidates);

/// Evaluates all 54 candidates and returns the minimiser.
Selection select_action(ControllerState& state, const DceeConfig& dcee,
                        const ActionConfig& actions, const WecParams& plant);

struct ControllerStep {
  PtoProfile command;
  Selection selection;
  WaveParams nominal;
  WaveParams spread;
};

/// Cascade filter update on the measurements taken under state.current,
/// then action selection. Advances step_index and time.
ControllerStep controller_step(ControllerState& state, const CascadeMeasurements& m,
                               const CascadeWindows& windows, const WecParams& plant,
                               const DceeConfig& dcee, const ActionConfig& actions);

}  // namespace wec
