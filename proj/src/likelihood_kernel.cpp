#include "likelihood_kernel.hpp"

#include <cmath>

namespace wec::detail {
namespace {

// sin(c + r T / 2) * sinc(r T / 2), branch-free; x = 0 is nudged off zero.
inline double window_mean_sin(double c, double rate, double duration) {
  double half = 0.5 * rate * duration;
  half = std::fabs(half) < 1e-30 ? 1e-30 : half;
  return std::sin(c + half) * std::sin(half) / half;
}

}  // namespace

void predict_window_powers(double force_amplitude, double force_phase, double omega,
                           double self_power, double duration, const WaveResponseArrays& waves,
                           const double* __restrict log_weight, double likelihood_fraction,
                           double likelihood_floor, double* __restrict predicted,
                           double* __restrict inv_sigma, double* __restrict base) {
  const double* __restrict amp = waves.amplitude;
  const double* __restrict ph = waves.phase;
  const double* __restrict om = waves.omega;
  const double half_force = 0.5 * force_amplitude;
  for (std::size_t i = 0; i < waves.size; ++i) {
    const double fy = half_force * amp[i];
    const double p = self_power +
                     fy * window_mean_sin(force_phase - ph[i], omega - om[i], duration) -
                     fy * window_mean_sin(force_phase + ph[i], omega + om[i], duration);
    predicted[i] = p;
    const double scaled = likelihood_fraction * std::fabs(p);
    const double sigma = scaled > likelihood_floor ? scaled : likelihood_floor;
    inv_sigma[i] = 1.0 / sigma;
    base[i] = log_weight[i] == kLogZero ? kLogZero : log_weight[i] - std::log(sigma);
  }
}

double relative_likelihood_weights(const double* __restrict base,
                                   const double* __restrict predicted,
                                   const double* __restrict inv_sigma, double measured,
                                   std::size_t n, double* __restrict out) {
  double best = kLogZero;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = (measured - predicted[i]) * inv_sigma[i];
    const double lw = base[i] - 0.5 * z * z;
    out[i] = lw;
    best = lw > best ? lw : best;
  }
  double total = 0.0;
  // Below this the weight is treated as zero; clamping keeps exp() on its
  // fast path and away from subnormals.
  constexpr double kCutoff = -700.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = out[i] - best;
    const double e = std::exp(d < kCutoff ? kCutoff : d);
    const double w = d < kCutoff ? 0.0 : e;
    out[i] = w;
    total += w;
  }
  return total;
}

}  // namespace wec::detail
