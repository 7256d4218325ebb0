#include "wecdcee/wec_plant.hpp"

#include <algorithm>
#include <cmath>

namespace wec {

WecState step(const WecState& s, const WecParams& plant, double force, double eta,
              double dt) {
  return step(
      s, plant, [eta](double) { return eta; },
      [force](double, double, double) { return force; }, dt);
}

std::size_t steps_in(double seconds, double dt) {
  const double n = seconds / dt;
  const double r = std::round(n);
  if (!(r >= 1.0) || std::abs(n - r) > 1e-6 * std::max(1.0, r)) {
    throw ConfigError("window length must be a positive whole number of plant steps");
  }
  return static_cast<std::size_t>(r);
}

void MeasurementWindows::validate(double dt) const {
  if (!(0.0 < t1 && t1 < t2 && t2 < t)) {
    throw ConfigError("measurement windows must satisfy 0 < T1 < T2 < T");
  }
  if (!(noise_fraction >= 0.0)) throw ConfigError("noise fraction must be >= 0");
  steps_in(t1, dt);
  steps_in(t2, dt);
  steps_in(t, dt);
}

PowerTrace::PowerTrace(std::size_t capacity, double dt) : buf_(capacity, 0.0), dt_(dt) {
  if (capacity == 0) throw ConfigError("power trace needs a positive capacity");
}

void PowerTrace::push(double power) {
  buf_[head_] = power;
  head_ = (head_ + 1) % buf_.size();
  count_ = std::min(count_ + 1, buf_.size());
}

double PowerTrace::trailing_mean(double seconds) const {
  const std::size_t n = steps_in(seconds, dt_);
  if (n > count_) throw DomainError("power trace shorter than the requested window");
  double sum = 0.0;
  std::size_t idx = head_;
  for (std::size_t i = 0; i < n; ++i) {
    idx = (idx == 0 ? buf_.size() : idx) - 1;
    sum += buf_[idx];
  }
  return sum / static_cast<double>(n);
}

WindowedPower clean_measurements(const PowerTrace& trace,
                                 const MeasurementWindows& windows) {
  return {trace.trailing_mean(windows.t1), trace.trailing_mean(windows.t2),
          trace.trailing_mean(windows.t)};
}

WindowedPower windowed_measurements(const PowerTrace& trace,
                                    const MeasurementWindows& windows,
                                    std::mt19937_64& rng) {
  WindowedPower m = clean_measurements(trace, windows);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (double* value : {&m.t1, &m.t2, &m.t}) {
    const double noise = unit(rng);
    *value += windows.noise_fraction * std::abs(*value) * noise;
  }
  return m;
}

}  // namespace wec
