// Closed-form steady-state response and average power of a heaving point
// absorber driven by a harmonic wave and a harmonic PTO force.
//
// All functions are pure. Phases follow the absolute-time convention of
// WaveParams / PtoProfile; use shift_origin() to re-reference a signal to the
// start of an averaging window.
#pragma once

#include "wecdcee/types.hpp"

namespace wec {

/// Velocity response v(t) = A_x sin(w_u t + B_x) + A_y sin(w t + B_y).
struct ResponseComponents {
  double pto_amplitude = 0.0;   ///< A_x, m/s
  double pto_phase = 0.0;       ///< B_x, rad
  double wave_amplitude = 0.0;  ///< A_y, m/s
  double wave_phase = 0.0;      ///< B_y, rad
};

ResponseComponents response_components(const PtoProfile& profile,
                                       const WaveParams& wave,
                                       const WecParams& plant);

/// Window-mean power split into its analytic pieces.
///
/// `pto` is the always-non-positive self term of the PTO force, `wave` the
/// difference-frequency wave/PTO coupling integrated exactly over the window
/// (continuous through w_u == w), and `residue` collects the 2*w_u and
/// w_u + w oscillations that only vanish for whole numbers of periods.
struct PowerTerms {
  double pto = 0.0;
  double wave = 0.0;
  double residue = 0.0;

  [[nodiscard]] double total() const { return pto + wave + residue; }
};

PowerTerms average_power_terms(const PtoProfile& profile, const WaveParams& wave,
                               const WecParams& plant, double duration);

/// Mean of -F_u(t) v(t) over [0, duration] in steady state, watts.
double average_power(const PtoProfile& profile, const WaveParams& wave,
                     const WecParams& plant, double duration);

/// Long-run (duration -> infinity) mean power.
double steady_average_power(const PtoProfile& profile, const WaveParams& wave,
                            const WecParams& plant);

// Precomputed halves of the power expression. Evaluating many particles
// against one profile only needs the wave half once per particle.

struct WaveResponse {
  double amplitude = 0.0;  ///< A_y
  double phase = 0.0;      ///< B_y
  double omega = 1.0;
};

struct ProfileResponse {
  double force_amplitude = 0.0;
  double force_phase = 0.0;
  double omega = 1.0;
  double velocity_amplitude = 0.0;  ///< A_x
  double velocity_phase = 0.0;      ///< B_x
};

WaveResponse wave_response(const WaveParams& wave, const WecParams& plant);
ProfileResponse profile_response(const PtoProfile& profile, const WecParams& plant);

/// Same value as average_power(); no argument validation.
double average_power(const ProfileResponse& profile, const WaveResponse& wave,
                     double duration);

/// Analytic maximiser of the long-run mean power. Not clamped to the force
/// limit.
PtoProfile optimal_profile(const WaveParams& wave, const WecParams& plant);

/// A^2 h_ex^2 / (8 h_r).
double optimal_average_power(const WaveParams& wave, const WecParams& plant);

/// v*(t) = R sin(w t + atan2(h_r, m w - K/w) + B + pi/2 + lambda).
struct OptimalVelocityForm {
  double amplitude = 0.0;  ///< R
  double lag = 0.0;        ///< lambda
};

OptimalVelocityForm optimal_velocity_form(const WaveParams& wave,
                                          const WecParams& plant);
double optimal_velocity(double t, const WaveParams& wave, const WecParams& plant);

/// Profile with its amplitude limited to the plant's force limit.
PtoProfile clamp_to_force_limit(PtoProfile profile, const WecParams& plant);

/// Best long-run power reachable without exceeding the force limit.
double feasible_optimal_power(const WaveParams& wave, const WecParams& plant);

/// Re-references a harmonic signal so that local time 0 is absolute time t0.
inline WaveParams shift_origin(WaveParams wave, double t0) {
  wave.phase += wave.omega * t0;
  return wave;
}
inline PtoProfile shift_origin(PtoProfile profile, double t0) {
  profile.phase += profile.omega * t0;
  return profile;
}

/// sin(x)/x, continuous at 0.
double sinc(double x);

}  // namespace wec
