#include "wecdcee/baseline_controllers.hpp"

#include <algorithm>
#include <cmath>

namespace wec {
namespace {

double dither(double frequency, double period, std::size_t k) {
  return std::sin(kTwoPi * frequency * period * static_cast<double>(k));
}

PtoGains dithered(const PtoGains& nominal, const EscConfig& c, std::size_t k) {
  return {nominal.resistive + c.dither_amplitude.resistive *
                                  dither(c.dither_frequency_resistive, c.period, k),
          nominal.reactive + c.dither_amplitude.reactive *
                                 dither(c.dither_frequency_reactive, c.period, k)};
}

}  // namespace

double bang_bang_force(const WecState& s, double force_limit, double deadband) {
  if (std::abs(s.v) < deadband) return 0.0;
  return s.v > 0.0 ? -force_limit : force_limit;
}

PtoProfile oracle_profile(const WaveParams& true_wave, const WecParams& plant) {
  if (true_wave.amplitude == 0.0) return {0.0, 0.0, std::max(true_wave.omega, kFrequencyFloor)};
  return clamp_to_force_limit(optimal_profile(true_wave, plant), plant);
}

void EscConfig::validate() const {
  if (!(period > 0.0)) throw ConfigError("ESC period must be positive");
  const double nyquist = 0.5 / period;
  for (double f : {dither_frequency_resistive, dither_frequency_reactive}) {
    if (!(f > 0.0 && f < nyquist)) {
      throw ConfigError("ESC dither frequencies must lie in (0, 0.5 / period)");
    }
  }
  if (dither_frequency_resistive == dither_frequency_reactive) {
    throw ConfigError("ESC dither frequencies must be distinct");
  }
  if (!(highpass > 0.0 && highpass <= 1.0)) throw ConfigError("ESC high-pass weight must lie in (0, 1]");
  if (!(lower.resistive <= upper.resistive && lower.reactive <= upper.reactive)) {
    throw ConfigError("ESC gain bounds need lower <= upper");
  }
}

EscState esc_init(const EscConfig& c) {
  c.validate();
  EscState s;
  s.nominal = c.initial;
  s.applied = dithered(s.nominal, c, 0);
  return s;
}

EscState esc_step(EscState s, double measured, const EscConfig& c) {
  if (!s.primed) {
    s.mean_power = measured;
    s.primed = true;
  } else {
    s.mean_power += c.highpass * (measured - s.mean_power);
  }
  const double g = measured - s.mean_power;
  const std::size_t k = s.updates;
  s.nominal.resistive += c.adaptation.resistive * g * dither(c.dither_frequency_resistive, c.period, k);
  s.nominal.reactive += c.adaptation.reactive * g * dither(c.dither_frequency_reactive, c.period, k);
  s.nominal.resistive = std::clamp(s.nominal.resistive, c.lower.resistive, c.upper.resistive);
  s.nominal.reactive = std::clamp(s.nominal.reactive, c.lower.reactive, c.upper.reactive);
  ++s.updates;
  s.applied = dithered(s.nominal, c, s.updates);
  return s;
}

}  // namespace wec
