#include "wecdcee/energy_model.hpp"

#include <algorithm>
#include <cmath>

namespace wec {
namespace {

void require_frequency(double omega, const char* what) {
  if (!(omega >= kFrequencyFloor) || !std::isfinite(omega)) {
    throw DomainError(std::string(what) + " must be a finite frequency >= 1e-3 rad/s");
  }
}

void require_duration(double duration) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw DomainError("averaging duration must be positive and finite");
  }
}

// (1/T) * integral_0^T sin(c + rate * t) dt, written so that it stays exact as
// rate -> 0, where it tends to sin(c).
double window_mean_sin(double c, double rate, double duration) {
  const double half = 0.5 * rate * duration;
  return std::sin(c + half) * sinc(half);
}

}  // namespace

double sinc(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

ResponseComponents response_components(const PtoProfile& profile,
                                       const WaveParams& wave,
                                       const WecParams& plant) {
  require_frequency(profile.omega, "PTO frequency");
  require_frequency(wave.omega, "wave frequency");
  ResponseComponents r;
  r.pto_amplitude = profile.amplitude / plant.impedance(profile.omega);
  r.pto_phase = plant.impedance_phase(profile.omega) + profile.phase;
  r.wave_amplitude = wave.amplitude * plant.excitation / plant.impedance(wave.omega);
  r.wave_phase = plant.impedance_phase(wave.omega) + wave.phase;
  return r;
}

WaveResponse wave_response(const WaveParams& wave, const WecParams& plant) {
  const double z = plant.impedance(wave.omega);
  return {wave.amplitude * plant.excitation / z,
          plant.impedance_phase(wave.omega) + wave.phase, wave.omega};
}

ProfileResponse profile_response(const PtoProfile& profile, const WecParams& plant) {
  ProfileResponse p;
  p.force_amplitude = profile.amplitude;
  p.force_phase = profile.phase;
  p.omega = profile.omega;
  p.velocity_amplitude = profile.amplitude / plant.impedance(profile.omega);
  p.velocity_phase = plant.impedance_phase(profile.omega) + profile.phase;
  return p;
}

namespace {

PowerTerms terms(const ProfileResponse& p, const WaveResponse& w, double duration) {
  PowerTerms t;
  const double fx = 0.5 * p.force_amplitude * p.velocity_amplitude;
  const double fy = 0.5 * p.force_amplitude * w.amplitude;
  // -F_u v_x = -fx [sin(2 w_u t + B_u + B_x) - sin(B_u - B_x)]
  t.pto = fx * std::sin(p.force_phase - p.velocity_phase);
  const double self_osc = -fx * window_mean_sin(p.force_phase + p.velocity_phase,
                                                2.0 * p.omega, duration);
  // -F_u v_y = -fy [sin((w_u + w) t + B_u + B_y) - sin(B_u - B_y + (w_u - w) t)]
  t.wave = fy * window_mean_sin(p.force_phase - w.phase, p.omega - w.omega, duration);
  const double sum_osc = -fy * window_mean_sin(p.force_phase + w.phase,
                                               p.omega + w.omega, duration);
  t.residue = self_osc + sum_osc;
  return t;
}

}  // namespace

double average_power(const ProfileResponse& profile, const WaveResponse& wave,
                     double duration) {
  return terms(profile, wave, duration).total();
}

PowerTerms average_power_terms(const PtoProfile& profile, const WaveParams& wave,
                               const WecParams& plant, double duration) {
  require_frequency(profile.omega, "PTO frequency");
  require_frequency(wave.omega, "wave frequency");
  require_duration(duration);
  return terms(profile_response(profile, plant), wave_response(wave, plant), duration);
}

double average_power(const PtoProfile& profile, const WaveParams& wave,
                     const WecParams& plant, double duration) {
  return average_power_terms(profile, wave, plant, duration).total();
}

double steady_average_power(const PtoProfile& profile, const WaveParams& wave,
                            const WecParams& plant) {
  require_frequency(profile.omega, "PTO frequency");
  require_frequency(wave.omega, "wave frequency");
  const auto p = profile_response(profile, plant);
  const auto w = wave_response(wave, plant);
  double value = 0.5 * p.force_amplitude * p.velocity_amplitude *
                 std::sin(p.force_phase - p.velocity_phase);
  if (profile.omega == wave.omega) {
    value += 0.5 * p.force_amplitude * w.amplitude * std::sin(p.force_phase - w.phase);
  }
  return value;
}

PtoProfile optimal_profile(const WaveParams& wave, const WecParams& plant) {
  require_frequency(wave.omega, "wave frequency");
  PtoProfile u;
  u.omega = wave.omega;
  u.phase = wave.phase + plant.impedance_phase(wave.omega) + 0.5 * kPi;
  u.amplitude = wave.amplitude * plant.excitation * plant.impedance(wave.omega) /
                (2.0 * plant.radiation_damping);
  return u;
}

double optimal_average_power(const WaveParams& wave, const WecParams& plant) {
  return square(wave.amplitude * plant.excitation) / (8.0 * plant.radiation_damping);
}

OptimalVelocityForm optimal_velocity_form(const WaveParams& wave,
                                          const WecParams& plant) {
  require_frequency(wave.omega, "wave frequency");
  // At the optimum the PTO-induced term has amplitude A h_ex / (2 h_r) and the
  // sum collapses onto the excitation force divided by 2 h_r.
  OptimalVelocityForm f;
  f.amplitude = wave.amplitude * plant.excitation / (2.0 * plant.radiation_damping);
  f.lag = -plant.impedance_phase(wave.omega);
  return f;
}

double optimal_velocity(double t, const WaveParams& wave, const WecParams& plant) {
  const auto f = optimal_velocity_form(wave, plant);
  return f.amplitude * std::sin(wave.omega * t + plant.impedance_phase(wave.omega) +
                                wave.phase + 0.5 * kPi + f.lag);
}

PtoProfile clamp_to_force_limit(PtoProfile profile, const WecParams& plant) {
  profile.amplitude = std::clamp(profile.amplitude, 0.0, plant.force_limit);
  return profile;
}

double feasible_optimal_power(const WaveParams& wave, const WecParams& plant) {
  // The long-run power is concave in the amplitude at the optimal phase and
  // frequency, so clamping the amplitude gives the constrained maximiser.
  return steady_average_power(clamp_to_force_limit(optimal_profile(wave, plant), plant),
                              wave, plant);
}

}  // namespace wec
