// Core value types shared by every module: wave and PTO parameter triples,
// plant constants, and the error hierarchy.
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wec {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Frequencies below this are rejected by the closed-form model (K/omega
/// blows up).
inline constexpr double kFrequencyFloor = 1e-3;

/// Invalid argument to a closed-form or numerical routine.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Simulation state became non-finite.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent scenario / component configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Harmonic wave eta(t) = amplitude * cos(omega * t + phase).
struct WaveParams {
  double amplitude = 0.0;  ///< m
  double phase = 0.0;      ///< rad
  double omega = 1.0;      ///< rad/s

  friend bool operator==(const WaveParams&, const WaveParams&) = default;
};

/// Harmonic PTO force F_u(t) = amplitude * cos(omega * t + phase).
struct PtoProfile {
  double amplitude = 0.0;  ///< N
  double phase = 0.0;      ///< rad
  double omega = 1.0;      ///< rad/s

  friend bool operator==(const PtoProfile&, const PtoProfile&) = default;
};

/// Heaving point-absorber constants plus actuation and motion limits.
struct WecParams {
  double mass = 8.0e3;               ///< buoy + added mass, kg
  double radiation_damping = 2.0e5;  ///< h_r, kg/s
  double stiffness = 6.39e5;         ///< K, N/m
  double excitation = 2.0e4;         ///< h_ex, kg/s^2
  double force_limit = 2.1e4;        ///< F_u_max, N
  double heave_limit = 1.0;          ///< x_max, m
  double velocity_limit = 3.0;       ///< v_max, m/s

  /// Mechanical reactance m*omega - K/omega.
  [[nodiscard]] double reactance(double omega) const {
    return mass * omega - stiffness / omega;
  }
  /// |m*omega - K/omega + i*h_r|.
  [[nodiscard]] double impedance(double omega) const {
    return std::hypot(reactance(omega), radiation_damping);
  }
  /// Quadrant-correct phase of the impedance, atan2(h_r, m*omega - K/omega).
  [[nodiscard]] double impedance_phase(double omega) const {
    return std::atan2(radiation_damping, reactance(omega));
  }

  void validate() const;
};

/// Wraps an angle into [-pi, pi).
inline double wrap_angle(double a) {
  double r = std::fmod(a + kPi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r - kPi;
}

inline double square(double x) { return x * x; }

inline void WecParams::validate() const {
  if (!(mass > 0.0 && radiation_damping > 0.0 && stiffness > 0.0 &&
        excitation > 0.0 && force_limit > 0.0 && heave_limit > 0.0 &&
        velocity_limit > 0.0)) {
    throw ConfigError("WecParams: all plant constants must be strictly positive");
  }
}

}  // namespace wec
