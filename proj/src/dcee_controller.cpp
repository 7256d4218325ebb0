#include "wecdcee/dcee_controller.hpp"

#include <algorithm>
#include <cmath>

#include "likelihood_kernel.hpp"

namespace wec {
namespace {

bool circular(const Interval& phase) { return phase.width() >= kTwoPi; }

double wrap_into(double phase, const Interval& range) {
  double y = std::fmod(phase - range.lo, kTwoPi);
  if (y < 0.0) y += kTwoPi;
  return range.lo + y;
}

}  // namespace

void ProfileBounds::validate() const {
  if (!(amplitude.lo >= 0.0 && amplitude.lo <= amplitude.hi)) {
    throw ConfigError("profile amplitude bounds must satisfy 0 <= lo <= hi");
  }
  if (!(phase.lo < phase.hi)) throw ConfigError("profile phase bounds need lo < hi");
  if (!(omega.lo >= kFrequencyFloor && omega.lo <= omega.hi)) {
    throw ConfigError("profile frequency bounds must satisfy 1e-3 <= lo <= hi");
  }
}

PtoProfile clamp_profile(PtoProfile u, const ProfileBounds& b) {
  u.amplitude = std::clamp(u.amplitude, b.amplitude.lo, b.amplitude.hi);
  u.omega = std::clamp(u.omega, b.omega.lo, b.omega.hi);
  u.phase = circular(b.phase) ? wrap_into(u.phase, b.phase)
                              : std::clamp(u.phase, b.phase.lo, b.phase.hi);
  return u;
}

bool within_bounds(const PtoProfile& u, const ProfileBounds& b) {
  const bool phase_ok = circular(b.phase) ? (u.phase >= b.phase.lo && u.phase < b.phase.lo + kTwoPi)
                                          : b.phase.contains(u.phase);
  return b.amplitude.contains(u.amplitude) && b.omega.contains(u.omega) && phase_ok;
}

void ActionConfig::validate() const {
  if (!(d_amplitude > 0.0 && d_phase > 0.0 && d_omega > 0.0)) {
    throw ConfigError("action step sizes must be positive");
  }
  if (!(alpha_min > 0.0 && alpha_min <= alpha_max)) {
    throw ConfigError("step gains must satisfy 0 < alpha_min <= alpha_max");
  }
  bounds.validate();
}

void DceeConfig::validate(std::size_t particles) const {
  if (!(q >= 1 && q <= m && m <= particles)) {
    throw ConfigError("subsample sizes must satisfy 1 <= Q <= M <= N");
  }
  if (!(horizon > 0.0)) throw ConfigError("planning window must be positive");
  if (!(p_max > 0.0)) throw ConfigError("P_max must be positive");
}

double default_p_max(const ConstraintRegion& region, const WecParams& plant) {
  return 1.5 * optimal_average_power({region.amplitude.hi, 0.0, 1.0}, plant);
}

std::vector<Action> candidate_actions(const ActionConfig& c, double alpha) {
  std::vector<Action> out;
  out.reserve(kCandidateCount);
  for (int scaled = 0; scaled < 2; ++scaled) {
    const double gain = scaled ? alpha : 1.0;
    for (int a = -1; a <= 1; ++a) {
      for (int b = -1; b <= 1; ++b) {
        for (int w = -1; w <= 1; ++w) {
          out.push_back({gain * a * c.d_amplitude, gain * b * c.d_phase,
                         gain * w * c.d_omega, scaled == 1});
        }
      }
    }
  }
  return out;
}

std::vector<Action> candidate_actions(const ActionConfig& c, std::mt19937_64& rng,
                                      double* alpha) {
  double a = c.alpha_min;
  if (c.alpha_min != c.alpha_max) {
    if (c.gain_distribution == GainDistribution::kUniform) {
      a = std::uniform_real_distribution<double>(c.alpha_min, c.alpha_max)(rng);
    } else {
      const double lo = std::log(c.alpha_min);
      a = std::exp(std::uniform_real_distribution<double>(lo, std::log(c.alpha_max))(rng));
    }
  }
  if (alpha) *alpha = a;
  return candidate_actions(c, a);
}

PtoProfile apply_action(const PtoProfile& current, const Action& action,
                        const ActionConfig& config, double switch_time, double horizon) {
  PtoProfile next{current.amplitude + action.d_amplitude, current.phase + action.d_phase,
                  current.omega + action.d_omega};
  next = clamp_profile(next, config.bounds);
  if (config.phase_anchor != PhaseAnchor::kAbsolute && next.omega != current.omega) {
    const double anchor =
        switch_time + (config.phase_anchor == PhaseAnchor::kMidpoint ? 0.5 * horizon : 0.0);
    next.phase -= (next.omega - current.omega) * anchor;
    next = clamp_profile(next, config.bounds);
  }
  return next;
}

CostEvaluator::CostEvaluator(const ParticleEnsemble& ensemble, double window_start,
                             const DceeConfig& config, const WecParams& plant,
                             std::mt19937_64& rng)
    : ensemble_(ensemble), window_start_(window_start), config_(config), plant_(plant) {
  config_.validate(ensemble.size());
  const std::size_t n = ensemble.size();
  local_.resize(n);
  response_amplitude_.resize(n);
  response_phase_.resize(n);
  response_omega_.resize(n);
  log_weights_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto w = shift_origin(ensemble.particles[i], window_start);
    w.phase = wrap_angle(w.phase);
    local_[i] = w;
    const auto r = wave_response(w, plant);
    response_amplitude_[i] = r.amplitude;
    response_phase_[i] = r.phase;
    response_omega_[i] = r.omega;
    const double wi = ensemble.weights[i];
    log_weights_[i] = wi > 0.0 ? std::log(wi) : detail::kLogZero;
  }
  std::vector<double> scratch;
  sample_without_replacement(ensemble.weights, config_.m, rng, scratch, hypotheses_);
  subsample_seed_ = rng();
}

CostTerms CostEvaluator::evaluate(const PtoProfile& profile) const {
  const std::size_t n = ensemble_.size();
  const auto& est = ensemble_.config;
  auto local = shift_origin(profile, window_start_);
  local.phase = wrap_angle(local.phase);
  const auto applied = profile_response(local, plant_);
  const double self_power = average_power(applied, WaveResponse{0.0, 0.0, 1.0}, config_.horizon);

  std::vector<double> predicted(n), inv_sigma(n), base(n), weights(n), scratch;
  detail::predict_window_powers(
      applied.force_amplitude, applied.force_phase, applied.omega, self_power, config_.horizon,
      {response_amplitude_.data(), response_phase_.data(), response_omega_.data(), n},
      log_weights_.data(), est.likelihood_fraction, est.likelihood_floor, predicted.data(),
      inv_sigma.data(), base.data());

  auto nominal_power = [&](const WaveParams& nominal) {
    return average_power(applied, wave_response(nominal, plant_), config_.horizon);
  };

  std::mt19937_64 rng(subsample_seed_);
  std::vector<std::size_t> chosen;
  std::vector<WaveParams> subsample;
  CostTerms sum;
  for (const std::size_t h : hypotheses_) {
    const double synthetic = predicted[h];
    const double total = detail::relative_likelihood_weights(
        base.data(), predicted.data(), inv_sigma.data(), synthetic, n, weights.data());
    double p_bar = 0.0;
    double spread = 0.0;
    if (config_.form == ExplorationForm::kSubsample) {
      sample_without_replacement(weights, config_.q, rng, scratch, chosen);
      subsample.clear();
      for (const auto i : chosen) subsample.push_back(local_[i]);
      p_bar = nominal_power(nominal_estimate(subsample));
      for (const auto i : chosen) spread += square(p_bar - predicted[i]);
    } else {
      for (auto& w : weights) w /= total;
      double a = 0.0, s = 0.0, c = 0.0, om = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double w = weights[i];
        if (w == 0.0) continue;
        a += w * local_[i].amplitude;
        om += w * local_[i].omega;
        s += w * std::sin(local_[i].phase);
        c += w * std::cos(local_[i].phase);
      }
      p_bar = nominal_power({a, std::atan2(s, c), om});
      for (std::size_t i = 0; i < n; ++i) spread += square(weights[i] * (predicted[i] - p_bar));
    }
    sum.exploitation += square(config_.p_max - p_bar);
    if (config_.exploration) sum.exploration += spread;
  }
  const double m = static_cast<double>(hypotheses_.size());
  return {sum.exploitation / m, sum.exploration / m};
}

CostTerms evaluate_cost(const Action& candidate, const ControllerState& state,
                        const DceeConfig& dcee, const ActionConfig& actions,
                        const WecParams& plant, std::mt19937_64& rng) {
  const CostEvaluator evaluator(state.ensemble, state.time, dcee, plant, rng);
  return evaluator.evaluate(apply_action(state.current, candidate, actions, state.time, dcee.horizon));
}

std::size_t argmin_cost(std::span<const CostTerms> costs, std::span<const Action> candidates) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < costs.size(); ++i) {
    if (costs[i].total() < costs[best].total()) best = i;
  }
  const double lowest = costs[best].total();
  for (std::size_t i = 0; i < costs.size(); ++i) {
    if (candidates[i].is_zero() && costs[i].total() == lowest) return i;
  }
  return best;
}

Selection select_action(ControllerState& state, const DceeConfig& dcee,
                        const ActionConfig& actions, const WecParams& plant) {
  Selection sel;
  sel.candidates = candidate_actions(actions, state.rng, &sel.alpha);
  const CostEvaluator evaluator(state.ensemble, state.time, dcee, plant, state.rng);
  sel.costs.reserve(sel.candidates.size());
  for (const auto& a : sel.candidates) {
    sel.costs.push_back(evaluator.evaluate(apply_action(state.current, a, actions, state.time, dcee.horizon)));
  }
  sel.index = argmin_cost(sel.costs, sel.candidates);
  sel.profile = apply_action(state.current, sel.candidates[sel.index], actions, state.time,
                             dcee.horizon);
  return sel;
}

ControllerStep controller_step(ControllerState& state, const CascadeMeasurements& m,
                               const CascadeWindows& windows, const WecParams& plant,
                               const DceeConfig& dcee, const ActionConfig& actions) {
  state.ensemble = cascade_update(std::move(state.ensemble), m, state.current, windows, plant);
  state.time = m.end_time;
  ControllerStep out;
  out.nominal = nominal_estimate(state.ensemble, state.time);
  out.spread = posterior_std(state.ensemble, state.time);
  out.selection = select_action(state, dcee, actions, plant);
  out.command = out.selection.profile;
  state.current = out.command;
  ++state.step_index;
  return out;
}

}  // namespace wec
