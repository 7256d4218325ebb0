// Vectorised inner loops of the cost evaluation. Built with relaxed FP flags
// so sin() and exp() map onto the vector math library; inputs must be finite.
#pragma once

#include <cstddef>

namespace wec::detail {

/// Finite stand-in for log(0) in `base`.
inline constexpr double kLogZero = -1e300;

/// Particle wave responses in structure-of-arrays form.
struct WaveResponseArrays {
  const double* amplitude;
  const double* phase;
  const double* omega;
  std::size_t size;
};

/// Window-mean power of one profile against every particle (same algebra as
/// average_power(ProfileResponse, WaveResponse, duration)), plus the
/// likelihood terms that depend on it:
///   inv_sigma[i] = 1 / max(fraction * |p_i|, floor)
///   base[i]      = log_weight[i] + log(inv_sigma[i])  (kLogZero stays put)
/// `self_power` is the particle-independent PTO self term.
void predict_window_powers(double force_amplitude, double force_phase, double omega,
                           double self_power, double duration, const WaveResponseArrays& waves,
                           const double* log_weight, double likelihood_fraction,
                           double likelihood_floor, double* predicted, double* inv_sigma,
                           double* base);

/// out[i] = exp(lw[i] - max_k lw[k]) with
/// lw[i] = base[i] - 0.5 * ((measured - predicted[i]) * inv_sigma[i])^2.
/// Returns sum(out).
double relative_likelihood_weights(const double* base, const double* predicted,
                                   const double* inv_sigma, double measured,
                                   std::size_t n, double* out);

}  // namespace wec::detail
