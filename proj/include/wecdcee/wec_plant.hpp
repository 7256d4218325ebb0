// Time-domain heave plant m v' = -h_r v - K x + h_ex eta + F_u, integrated
// with fixed-step classical RK4, plus power bookkeeping and noisy windowed
// average-power measurements.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "wecdcee/types.hpp"

namespace wec {

struct WecState {
  double x = 0.0;  ///< heave, m
  double v = 0.0;  ///< heave velocity, m/s
  double t = 0.0;  ///< s
};

struct LimitFlags {
  bool heave = false;
  bool velocity = false;
};

inline LimitFlags check_limits(const WecState& s, const WecParams& plant) {
  return {std::abs(s.x) > plant.heave_limit, std::abs(s.v) > plant.velocity_limit};
}

inline double saturate_force(double force, const WecParams& plant) {
  return std::clamp(force, -plant.force_limit, plant.force_limit);
}

/// -F_u * v: positive when the PTO opposes the motion (energy extracted).
inline double instantaneous_power(const WecState& s, double force) {
  return -force * s.v;
}

/// One RK4 step. `eta(t)` is the wave elevation and `force(t, x, v)` the PTO
/// force law; the force is saturated to the plant limit at every stage.
template <class Elevation, class ForceLaw>
WecState step(const WecState& s, const WecParams& plant, Elevation&& eta,
              ForceLaw&& force, double dt) {
  if (!(dt > 0.0)) throw DomainError("plant step needs dt > 0");
  auto accel = [&](double t, double x, double v) {
    const double f = saturate_force(force(t, x, v), plant);
    return (-plant.radiation_damping * v - plant.stiffness * x +
            plant.excitation * eta(t) + f) / plant.mass;
  };
  const double h = 0.5 * dt;
  const double k1x = s.v;
  const double k1v = accel(s.t, s.x, s.v);
  const double k2x = s.v + h * k1v;
  const double k2v = accel(s.t + h, s.x + h * k1x, k2x);
  const double k3x = s.v + h * k2v;
  const double k3v = accel(s.t + h, s.x + h * k2x, k3x);
  const double k4x = s.v + dt * k3v;
  const double k4v = accel(s.t + dt, s.x + dt * k3x, k4x);
  WecState out;
  out.x = s.x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  out.v = s.v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  out.t = s.t + dt;
  if (!std::isfinite(out.x) || !std::isfinite(out.v)) {
    throw NumericError("plant state became non-finite");
  }
  return out;
}

/// Step with force and elevation held constant over the interval.
WecState step(const WecState& s, const WecParams& plant, double force, double eta,
              double dt);

/// Averaging windows of the high-level loop and the relative sensor noise on
/// each windowed average.
struct MeasurementWindows {
  double t1 = 20.0;
  double t2 = 30.0;
  double t = 50.0;
  double noise_fraction = 0.05;

  /// Throws ConfigError unless 0 < t1 < t2 < t and each window is a whole
  /// number of plant steps.
  void validate(double dt) const;
};

/// Number of plant steps covering `seconds`; throws if not a whole multiple.
std::size_t steps_in(double seconds, double dt);

/// Fixed-capacity history of per-step instantaneous power samples.
class PowerTrace {
 public:
  PowerTrace(std::size_t capacity, double dt);

  void push(double power);
  [[nodiscard]] std::size_t size() const { return count_; }
  [[nodiscard]] double dt() const { return dt_; }

  /// Mean of the newest round(seconds / dt) samples.
  [[nodiscard]] double trailing_mean(double seconds) const;

 private:
  std::vector<double> buf_;
  std::size_t head_ = 0;
  std::size_t count_ = 0;
  double dt_;
};

struct WindowedPower {
  double t1 = 0.0;
  double t2 = 0.0;
  double t = 0.0;
};

/// Trailing means over the three windows, each corrupted by independent
/// zero-mean Gaussian noise with std noise_fraction * |clean value|.
WindowedPower windowed_measurements(const PowerTrace& trace,
                                    const MeasurementWindows& windows,
                                    std::mt19937_64& rng);

/// The clean trailing means, no noise.
WindowedPower clean_measurements(const PowerTrace& trace,
                                 const MeasurementWindows& windows);

}  // namespace wec
