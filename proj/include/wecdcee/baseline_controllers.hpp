// Reference controllers: bang-bang switching on the velocity sign, a
// two-gain sinusoidal-dither extremum-seeking controller, and the
// clairvoyant clamped analytic optimum.
#pragma once

#include <cstddef>

#include "wecdcee/energy_model.hpp"
#include "wecdcee/wec_plant.hpp"

namespace wec {

inline constexpr double kBangBangDeadband = 1e-3;  // m/s

/// -force_limit * sign(v); zero inside the velocity deadband.
double bang_bang_force(const WecState& state, double force_limit,
                       double deadband = kBangBangDeadband);

/// optimal_profile() with its amplitude clamped to the force limit.
PtoProfile oracle_profile(const WaveParams& true_wave, const WecParams& plant);

/// F_u = -resistive * v - reactive * x.
struct PtoGains {
  double resistive = 0.0;  ///< kg/s
  double reactive = 0.0;   ///< N/m
};

inline double feedback_force(const PtoGains& g, double x, double v) {
  return -g.resistive * v - g.reactive * x;
}

/// Discrete perturb-and-observe ESC. One update per `period` seconds on the
/// mean power measured over that period; each gain carries its own
/// sinusoidal dither, the measurement is high-passed, demodulated by the
/// dither that produced it and integrated.
struct EscConfig {
  double period = 5.0;  ///< s, measurement/update interval
  PtoGains initial{5.0e4, 0.0};
  PtoGains dither_amplitude{1.0e4, 4.0e4};
  double dither_frequency_resistive = 0.013;  ///< Hz
  double dither_frequency_reactive = 0.021;   ///< Hz
  PtoGains adaptation{2.0e3, 1.0e3};  ///< gain increment per (W * unit dither)
  double highpass = 0.2;  ///< weight of the newest sample in the running mean
  PtoGains lower{0.0, -1.0e6};
  PtoGains upper{1.0e6, 1.0e6};

  /// Dither frequencies must be distinct, positive and below the update
  /// Nyquist rate 0.5 / period.
  void validate() const;
};

struct EscState {
  PtoGains nominal;  ///< integrator state, the gains without dither
  PtoGains applied;  ///< nominal + dither, in force since the last update
  double mean_power = 0.0;
  std::size_t updates = 0;
  bool primed = false;
};

EscState esc_init(const EscConfig& config);

/// Consumes the mean power measured under `state.applied` and returns the
/// state carrying the next applied gains.
EscState esc_step(EscState state, double measured_power, const EscConfig& config);

}  // namespace wec
