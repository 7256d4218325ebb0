// Hand-enumerable filter and controller instances shared by the unit tests
// and the acceptance binary. Every expected value is rebuilt from the textbook
// formulas with plain loops; nothing here calls the cost evaluator.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "wecdcee/dcee_controller.hpp"

namespace small {

using namespace wec;

inline const WecParams kPlant;

struct Check {
  bool ok = true;
  double worst = 0.0;  ///< largest relative deviation seen

  void relative(double got, double want, double tol) {
    const double scale = std::max({std::abs(want), std::abs(got), 1e-300});
    const double err = std::abs(got - want) / scale;
    worst = std::max(worst, err);
    if (!(err <= tol)) ok = false;
  }
  void exact(bool same) { ok = ok && same; }
};

inline double sigma_of(double predicted) { return std::max(0.05 * std::abs(predicted), 1e-3); }

inline double gaussian(double x, double mean, double sigma) {
  return std::exp(-0.5 * ((x - mean) / sigma) * ((x - mean) / sigma)) / sigma;
}

/// (a) one update on ten weighted particles against prior x likelihood.
inline Check bayes_ten_particles() {
  std::vector<WaveParams> ps;
  std::vector<double> prior;
  for (int i = 0; i < 10; ++i) {
    ps.push_back({0.4 + 0.17 * i, -1.5 + 0.3 * i, 0.9 + 0.05 * i});
    prior.push_back(static_cast<double>(10 - i) + 0.5 * (i % 3));
  }
  const double z0 = std::accumulate(prior.begin(), prior.end(), 0.0);
  for (auto& w : prior) w /= z0;
  EstimatorConfig cfg;
  cfg.particles = 10;
  cfg.ess_threshold = 1e-9;  // pure Bayes step, no resampling
  ParticleEnsemble e(ps, prior, ConstraintRegion{}, cfg, 1);
  const PtoProfile applied{9000.0, 1.1, 1.15};
  const MeasurementWindow window{0.0, 50.0};
  const double measured = 25.0;
  const auto post = update(e, measured, applied, window, kPlant);

  std::vector<double> expected(10);
  for (int i = 0; i < 10; ++i) {
    const double p = average_power(applied, ps[i], kPlant, window.length);
    expected[i] = prior[i] * gaussian(measured, p, sigma_of(p));
  }
  const double z = std::accumulate(expected.begin(), expected.end(), 0.0);
  Check c;
  for (int i = 0; i < 10; ++i) {
    if (expected[i] / z < 1e-280) {
      c.exact(post.weights[i] < 1e-250);
    } else {
      c.relative(post.weights[i], expected[i] / z, 1e-12);
    }
  }
  c.exact(!post.last.resampled);
  return c;
}

/// Two particles whose powers under `profile` over a 50 s window from t = 0
/// are exactly `low_w` and `high_w`: same phase and frequency, amplitudes
/// solved from the linearity of the power in the wave amplitude.
struct TwoParticles {
  PtoProfile profile;
  WaveParams low, high;
};

inline TwoParticles particles_at(double low_w, double high_w) {
  const double omega = 1.2;
  PtoProfile u = optimal_profile({1.0, 0.0, omega}, kPlant);
  u.amplitude = 6000.0;
  const double self = average_power(u, {0.0, 0.0, omega}, kPlant, 50.0);
  const double slope = average_power(u, {1.0, 0.0, omega}, kPlant, 50.0) - self;
  return {u, {(low_w - self) / slope, 0.0, omega}, {(high_w - self) / slope, 0.0, omega}};
}

inline double circular_mean(const std::vector<double>& phases, const std::vector<double>& w) {
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    s += w[i] * std::sin(phases[i]);
    c += w[i] * std::cos(phases[i]);
  }
  return std::atan2(s, c);
}

/// (c) the two-particle cost in both exploration forms, against hand algebra.
/// The weighted form uses powers within a few likelihood widths of each other;
/// at 10 W and 20 W its posterior collapses and the spread is pure round-off.
inline Check two_particle_cost(ExplorationForm form) {
  const bool weighted = form == ExplorationForm::kWeighted;
  const double high_w = weighted ? 10.6 : 20.0;
  const auto tp = particles_at(10.0, high_w);
  EstimatorConfig cfg;
  cfg.particles = 2;
  cfg.ess_threshold = 1.0;
  ControllerState state;
  state.ensemble = ParticleEnsemble({tp.low, tp.high}, {0.5, 0.5}, ConstraintRegion{}, cfg, 3);
  state.current = tp.profile;
  state.time = 0.0;
  DceeConfig dcee{3000.0, 2, 2, 50.0, form, true};
  std::mt19937_64 rng(5);
  const auto got = evaluate_cost(Action{}, state, dcee, ActionConfig{}, kPlant, rng);

  const double p[2] = {average_power(tp.profile, tp.low, kPlant, 50.0),
                       average_power(tp.profile, tp.high, kPlant, 50.0)};
  Check c;
  c.relative(p[0], 10.0, 1e-9);
  c.relative(p[1], high_w, 1e-9);
  double exploitation = 0.0, exploration = 0.0;
  for (int j = 0; j < 2; ++j) {
    std::vector<double> w(2, 0.5);
    if (form == ExplorationForm::kWeighted) {
      for (int i = 0; i < 2; ++i) w[i] = 0.5 * gaussian(p[j], p[i], sigma_of(p[i]));
      const double z = w[0] + w[1];
      for (auto& x : w) x /= z;
    }
    const WaveParams nominal{w[0] * tp.low.amplitude + w[1] * tp.high.amplitude,
                             circular_mean({tp.low.phase, tp.high.phase}, w),
                             w[0] * tp.low.omega + w[1] * tp.high.omega};
    const double p_bar = average_power(tp.profile, nominal, kPlant, 50.0);
    exploitation += (dcee.p_max - p_bar) * (dcee.p_max - p_bar);
    for (int i = 0; i < 2; ++i) {
      const double d = form == ExplorationForm::kWeighted ? w[i] * (p[i] - p_bar) : p_bar - p[i];
      exploration += d * d;
    }
  }
  c.relative(got.exploitation, exploitation / 2.0, 1e-12);
  c.relative(got.exploration, exploration / 2.0, 1e-9);
  if (form == ExplorationForm::kSubsample) {
    // P_bar = 15 W by linearity, so the spread is 25 + 25.
    c.relative(got.exploration, 50.0, 1e-9);
    c.relative(got.exploitation, (3000.0 - 15.0) * (3000.0 - 15.0), 1e-12);
  }
  return c;
}

/// (b) select_action with N = M = Q = 2 against exhaustive enumeration.
struct Enumeration {
  Check check;
  std::size_t expected_index = 0;
  std::size_t got_index = 0;
};

inline Enumeration select_two_particles(std::uint64_t seed) {
  EstimatorConfig cfg;
  cfg.particles = 2;
  cfg.ess_threshold = 1.0;
  const WaveParams a{0.8, 0.4, 1.15}, b{1.1, -0.9, 1.3};
  ControllerState state;
  state.ensemble = ParticleEnsemble({a, b}, {0.3, 0.7}, ConstraintRegion{}, cfg, 11);
  state.current = {9000.0, 2.5, 1.2};
  state.time = 0.0;
  state.rng.seed(seed);
  const DceeConfig dcee{2500.0, 2, 2, 50.0, ExplorationForm::kSubsample, true};
  const ActionConfig actions;

  auto replay = state.rng;
  const double alpha =
      std::uniform_real_distribution<double>(actions.alpha_min, actions.alpha_max)(replay);

  // Enumerate the 27 signs at gain 1 then at gain alpha, in that order.
  std::vector<PtoProfile> profiles;
  std::vector<bool> zero;
  for (const double gain : {1.0, alpha}) {
    for (int da = -1; da <= 1; ++da) {
      for (int db = -1; db <= 1; ++db) {
        for (int dw = -1; dw <= 1; ++dw) {
          double phase = state.current.phase + gain * db * actions.d_phase;
          phase = std::fmod(phase, kTwoPi);
          if (phase < 0.0) phase += kTwoPi;
          profiles.push_back({state.current.amplitude + gain * da * actions.d_amplitude, phase,
                              state.current.omega + gain * dw * actions.d_omega});
          zero.push_back(da == 0 && db == 0 && dw == 0);
        }
      }
    }
  }
  std::vector<double> cost;
  for (const auto& u : profiles) {
    const double pa = average_power(u, a, kPlant, 50.0);
    const double pb = average_power(u, b, kPlant, 50.0);
    // Q = N: the subsample is the whole ensemble with uniform weights.
    const WaveParams nominal{0.5 * (a.amplitude + b.amplitude),
                             circular_mean({a.phase, b.phase}, {0.5, 0.5}),
                             0.5 * (a.omega + b.omega)};
    const double p_bar = average_power(u, nominal, kPlant, 50.0);
    cost.push_back((dcee.p_max - p_bar) * (dcee.p_max - p_bar) + (p_bar - pa) * (p_bar - pa) +
                   (p_bar - pb) * (p_bar - pb));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < cost.size(); ++i) {
    if (cost[i] < cost[best]) best = i;
  }
  for (std::size_t i = 0; i < cost.size(); ++i) {
    if (zero[i] && cost[i] == cost[best]) best = i;
  }

  const auto sel = select_action(state, dcee, actions, kPlant);
  Enumeration out;
  out.expected_index = best;
  out.got_index = sel.index;
  out.check.exact(sel.candidates.size() == profiles.size());
  out.check.exact(sel.alpha == alpha);
  out.check.exact(sel.index == best);
  out.check.exact(sel.profile == profiles[best]);
  for (std::size_t i = 0; i < cost.size() && i < sel.costs.size(); ++i) {
    out.check.relative(sel.costs[i].total(), cost[i], 1e-12);
  }
  return out;
}

}  // namespace small
