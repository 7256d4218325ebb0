#include "wecdcee/wave_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

namespace wec {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double wrapped_phase(double b) { return wrap_angle(b); }

bool phase_in(double b, const Interval& range) {
  if (range.width() >= kTwoPi) return true;
  return range.contains(wrapped_phase(b));
}

void normalise(std::vector<double>& w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= total;
}

// Silverman's rule for a Gaussian kernel in 3 dimensions.
double kernel_bandwidth(std::size_t n) {
  return std::pow(4.0 / (5.0 * static_cast<double>(n)), 1.0 / 7.0);
}

WaveParams region_widths(const ConstraintRegion& c) {
  return {c.amplitude.width(), std::min(c.phase.width(), kTwoPi), c.omega.width()};
}

// Per-dimension jitter std for the coming resample. `spread` is the weighted
// posterior spread before resampling.
WaveParams jitter_scales(const ParticleEnsemble& e, const WaveParams& spread, bool surprised) {
  const auto& cfg = e.config;
  const auto width = region_widths(e.region);
  const WaveParams cap{cfg.roughening_fraction * width.amplitude,
                       cfg.roughening_fraction * width.phase,
                       cfg.roughening_fraction * width.omega};
  if (!cfg.adaptive_roughening || surprised) return cap;
  const double h = kernel_bandwidth(e.size());
  auto pick = [&](double s, double w, double hi) {
    return std::min(hi, std::max(cfg.roughening_floor_fraction * w, h * s));
  };
  return {pick(spread.amplitude, width.amplitude, cap.amplitude),
          pick(spread.phase, width.phase, cap.phase), pick(spread.omega, width.omega, cap.omega)};
}

// Jitters resampled particles. Frequency jitter optionally shifts the phase
// so each particle's wave phase at `reference_time` is unchanged. A draw that
// leaves the region is redrawn and, after kJitterAttempts, dropped: reflecting
// the reference phase back inside would scramble the phase at the measurement.
constexpr int kJitterAttempts = 8;

void roughen(ParticleEnsemble& e, double reference_time, const WaveParams& scale) {
  const auto& cfg = e.config;
  std::normal_distribution<double> unit(0.0, 1.0);
  for (auto& p : e.particles) {
    for (int attempt = 0; attempt < kJitterAttempts; ++attempt) {
      WaveParams q{p.amplitude + scale.amplitude * unit(e.rng), p.phase + scale.phase * unit(e.rng),
                   p.omega + scale.omega * unit(e.rng)};
      if (cfg.couple_phase_jitter) q.phase -= (q.omega - p.omega) * reference_time;
      q.phase = wrapped_phase(q.phase);
      if (e.region.contains(q)) {
        p = q;
        break;
      }
    }
  }
}

void regenerate(ParticleEnsemble& e, double frac) {
  if (frac <= 0.0) return;
  const auto& c = e.region;
  const auto n = static_cast<std::size_t>(std::floor(frac * static_cast<double>(e.size())));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, e.size() - 1);
  const double phase_lo = c.phase.width() >= kTwoPi ? -kPi : c.phase.lo;
  const double phase_w = std::min(c.phase.width(), kTwoPi);
  for (std::size_t k = 0; k < n; ++k) {
    auto& p = e.particles[pick(e.rng)];
    p.amplitude = c.amplitude.lo + c.amplitude.width() * u01(e.rng);
    p.phase = phase_lo + phase_w * u01(e.rng);
    p.omega = c.omega.lo + c.omega.width() * u01(e.rng);
  }
}

}  // namespace

bool ConstraintRegion::contains(const WaveParams& w) const {
  return amplitude.contains(w.amplitude) && omega.contains(w.omega) &&
         phase_in(w.phase, phase);
}

void ConstraintRegion::validate() const {
  if (!(amplitude.lo < amplitude.hi && phase.lo < phase.hi && omega.lo < omega.hi)) {
    throw ConfigError("constraint region needs lo < hi in every dimension");
  }
  if (omega.lo < kFrequencyFloor) {
    throw ConfigError("constraint region frequency floor must be >= 1e-3 rad/s");
  }
}

void EstimatorConfig::validate() const {
  if (particles == 0) throw ConfigError("particle count must be positive");
  if (!(ess_threshold > 0.0 && ess_threshold <= static_cast<double>(particles))) {
    throw ConfigError("ESS threshold must satisfy 0 < N_T <= N");
  }
  if (!(roughening_fraction >= 0.0 && likelihood_fraction >= 0.0 && likelihood_floor > 0.0)) {
    throw ConfigError("estimator noise scales must be non-negative (floor positive)");
  }
  if (!(roughening_floor_fraction >= 0.0 && roughening_floor_fraction <= roughening_fraction)) {
    throw ConfigError("roughening floor must lie in [0, roughening fraction]");
  }
  if (!(surprise_threshold > 0.0)) throw ConfigError("surprise threshold must be positive");
  if (!(surprise_regeneration_fraction >= 0.0 && surprise_regeneration_fraction <= 1.0)) {
    throw ConfigError("surprise regeneration fraction must lie in [0, 1]");
  }
  if (!(surprise_ess_fraction >= 0.0 && surprise_ess_fraction <= 1.0)) {
    throw ConfigError("surprise ESS fraction must lie in [0, 1]");
  }
  if (!(regeneration_fraction >= 0.0 && regeneration_fraction < 1.0)) {
    throw ConfigError("regeneration fraction must lie in [0, 1)");
  }
}

ParticleEnsemble::ParticleEnsemble(std::vector<WaveParams> p, std::vector<double> w,
                                   ConstraintRegion r, EstimatorConfig c,
                                   std::uint64_t seed)
    : particles(std::move(p)), weights(std::move(w)), region(r), config(c), rng(seed) {
  if (particles.size() != weights.size() || particles.empty()) {
    throw ConfigError("ensemble needs matching, non-empty particle and weight arrays");
  }
}

double reflect_into(double x, const Interval& range) {
  const double w = range.width();
  if (w <= 0.0) return range.lo;
  double y = std::fmod(x - range.lo, 2.0 * w);
  if (y < 0.0) y += 2.0 * w;
  if (y > w) y = 2.0 * w - y;
  return range.lo + y;
}

ParticleEnsemble init_ensemble(const WavePrior& prior, const EstimatorConfig& config,
                               const ConstraintRegion& region, std::uint64_t seed) {
  config.validate();
  region.validate();
  if (!region.contains(prior.mean)) throw DomainError("prior mean lies outside the constraint region");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<WaveParams> particles;
  particles.reserve(config.particles);
  std::size_t attempts = 0;
  while (particles.size() < config.particles) {
    WaveParams w{prior.mean.amplitude + prior.stddev.amplitude * unit(rng),
                 prior.mean.phase + prior.stddev.phase * unit(rng),
                 prior.mean.omega + prior.stddev.omega * unit(rng)};
    ++attempts;
    if (region.contains(w)) {
      w.phase = wrapped_phase(w.phase);
      particles.push_back(w);
    } else if (attempts >= 1000 &&
               static_cast<double>(particles.size()) < 0.01 * static_cast<double>(attempts)) {
      throw DomainError("prior places less than 1% of its mass inside the constraint region");
    }
  }
  std::vector<double> weights(config.particles, 1.0 / static_cast<double>(config.particles));
  return ParticleEnsemble(std::move(particles), std::move(weights), region, config,
                          rng());
}

double log_likelihood(double measured, double predicted, const EstimatorConfig& config) {
  const double sigma =
      std::max(config.likelihood_fraction * std::abs(predicted), config.likelihood_floor);
  const double z = (measured - predicted) / sigma;
  return -0.5 * z * z - std::log(sigma);
}

double effective_sample_size(std::span<const double> weights) {
  double s = 0.0;
  for (double w : weights) s += w * w;
  return s > 0.0 ? 1.0 / s : 0.0;
}

std::vector<std::size_t> systematic_resample(std::span<const double> weights,
                                             std::mt19937_64& rng) {
  const std::size_t n = weights.size();
  std::vector<std::size_t> idx(n);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double step = 1.0 / static_cast<double>(n);
  double u = u01(rng) * step;
  double cum = weights[0];
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (u > cum && j + 1 < n) cum += weights[++j];
    idx[i] = j;
    u += step;
  }
  return idx;
}

namespace {

// Shared reweighting core: multiplies weights by likelihoods of `measured`
// against per-particle predictions, zeroing out-of-region particles. Returns
// false (weights untouched) when every particle ends up with zero weight.
bool reweight(ParticleEnsemble& e, double measured, const std::vector<double>& predicted) {
  const std::size_t n = e.size();
  std::vector<double> lw(n);
  double best = kNegInf;
  for (std::size_t i = 0; i < n; ++i) {
    if (e.weights[i] <= 0.0 || !e.region.contains(e.particles[i])) {
      lw[i] = kNegInf;
      continue;
    }
    lw[i] = std::log(e.weights[i]) + log_likelihood(measured, predicted[i], e.config);
    best = std::max(best, lw[i]);
  }
  if (!std::isfinite(best)) return false;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = lw[i] == kNegInf ? 0.0 : std::exp(lw[i] - best);
    e.weights[i] = w;
    total += w;
  }
  for (auto& w : e.weights) w /= total;
  return true;
}

double surprise(const ParticleEnsemble& e, double measured,
                const std::vector<double>& predicted) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e.weights[i] <= 0.0 || !e.region.contains(e.particles[i])) continue;
    const double sigma =
        std::max(e.config.likelihood_fraction * std::abs(predicted[i]), e.config.likelihood_floor);
    best = std::min(best, std::abs(measured - predicted[i]) / sigma);
  }
  return best;
}

std::vector<double> predict(const ParticleEnsemble& e, const PtoProfile& applied,
                            const MeasurementWindow& window, const WecParams& plant) {
  const auto profile = profile_response(shift_origin(applied, window.start), plant);
  std::vector<double> out(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    const auto& p = e.particles[i];
    if (p.omega < kFrequencyFloor) {
      out[i] = 0.0;
      continue;
    }
    out[i] = average_power(profile, wave_response(shift_origin(p, window.start), plant),
                           window.length);
  }
  return out;
}

}  // namespace

namespace {

// Weighted interquartile range of `values` divided by 1.349, the std of a
// normal with the same quartiles.
double normal_iqr(std::vector<std::pair<double, double>>& values) {
  std::sort(values.begin(), values.end());
  double q1 = values.front().first, q3 = values.back().first, acc = 0.0;
  bool have_q1 = false;
  for (const auto& [v, w] : values) {
    acc += w;
    if (!have_q1 && acc >= 0.25) {
      q1 = v;
      have_q1 = true;
    }
    if (acc >= 0.75) {
      q3 = v;
      break;
    }
  }
  return (q3 - q1) / 1.349;
}

// min(std, IQR / 1.349) per dimension: the std alone is inflated by far
// low-weight modes, which would make kernel jitter far wider than the peak.
WaveParams robust_spread(const ParticleEnsemble& e, double reference_time) {
  const auto sd = posterior_std(e, reference_time);
  const auto mean = nominal_estimate(e, reference_time);
  const double mean_phase = mean.phase + mean.omega * reference_time;
  std::vector<std::pair<double, double>> a, b, w;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double wi = e.weights[i];
    if (wi <= 0.0) continue;
    const auto& p = e.particles[i];
    a.emplace_back(p.amplitude, wi);
    b.emplace_back(wrap_angle(p.phase + p.omega * reference_time - mean_phase), wi);
    w.emplace_back(p.omega, wi);
  }
  if (a.empty()) return sd;
  return {std::min(sd.amplitude, normal_iqr(a)), std::min(sd.phase, normal_iqr(b)),
          std::min(sd.omega, normal_iqr(w))};
}

}  // namespace

ParticleEnsemble update(ParticleEnsemble e, double measured, const PtoProfile& applied,
                        const MeasurementWindow& window, const WecParams& plant) {
  if (!(window.length > 0.0)) throw DomainError("measurement window must have positive length");
  if (applied.omega < kFrequencyFloor) throw DomainError("applied PTO frequency below floor");
  const auto predicted = predict(e, applied, window, plant);
  ++e.update_count;
  e.last = {};
  e.last.surprise = surprise(e, measured, predicted);
  if (!reweight(e, measured, predicted)) {
    // Every particle was rejected: keep the prior weights for this step.
    ++e.underflow_count;
    e.last.underflow = true;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (!e.region.contains(e.particles[i])) e.weights[i] = 0.0;
    }
    if (std::accumulate(e.weights.begin(), e.weights.end(), 0.0) <= 0.0) {
      std::fill(e.weights.begin(), e.weights.end(), 1.0);
    }
    normalise(e.weights);
  }
  e.last.ess = effective_sample_size(e.weights);
  const bool surprised =
      e.last.surprise > e.config.surprise_threshold ||
      e.last.ess < e.config.surprise_ess_fraction * static_cast<double>(e.size());
  if (e.config.adaptive_roughening && surprised) {
    ++e.surprise_count;
    e.last.surprised = true;
  }
  if (e.last.ess < e.config.ess_threshold || (e.config.adaptive_roughening && surprised)) {
    const auto scale = jitter_scales(e, robust_spread(e, window.end()), surprised);
    const auto idx = systematic_resample(e.weights, e.rng);
    std::vector<WaveParams> next(e.size());
    for (std::size_t i = 0; i < idx.size(); ++i) next[i] = e.particles[idx[i]];
    e.particles = std::move(next);
    std::fill(e.weights.begin(), e.weights.end(), 1.0 / static_cast<double>(e.size()));
    roughen(e, window.end(), scale);
    regenerate(e, surprised && e.config.adaptive_roughening
                      ? std::max(e.config.regeneration_fraction,
                                 e.config.surprise_regeneration_fraction)
                      : e.config.regeneration_fraction);
    ++e.resample_count;
    e.last.resampled = true;
  }
  return e;
}

ParticleEnsemble cascade_update(ParticleEnsemble e, const CascadeMeasurements& m,
                                const PtoProfile& applied, const CascadeWindows& w,
                                const WecParams& plant) {
  if (!(0.0 < w.t1 && w.t1 < w.t2 && w.t2 < w.t)) {
    throw DomainError("cascade windows must satisfy 0 < T1 < T2 < T");
  }
  e = update(std::move(e), m.p_t1, applied, {m.end_time - w.t1, w.t1}, plant);
  e = update(std::move(e), m.p_t2, applied, {m.end_time - w.t2, w.t2}, plant);
  e = update(std::move(e), m.p_t, applied, {m.end_time - w.t, w.t}, plant);
  return e;
}

namespace {

template <class Weight>
WaveParams weighted_mean(std::span<const WaveParams> ps, double t_ref, Weight&& weight) {
  double a = 0.0, w = 0.0, s = 0.0, c = 0.0, total = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double wi = weight(i);
    const double phase = ps[i].phase + ps[i].omega * t_ref;
    a += wi * ps[i].amplitude;
    w += wi * ps[i].omega;
    s += wi * std::sin(phase);
    c += wi * std::cos(phase);
    total += wi;
  }
  const double omega = w / total;
  return {a / total, wrap_angle(std::atan2(s, c) - omega * t_ref), omega};
}

}  // namespace

WaveParams nominal_estimate(const ParticleEnsemble& e, double reference_time) {
  return weighted_mean(e.particles, reference_time,
                       [&](std::size_t i) { return e.weights[i]; });
}

WaveParams nominal_estimate(std::span<const WaveParams> ps, double reference_time) {
  return weighted_mean(ps, reference_time, [](std::size_t) { return 1.0; });
}

WaveParams posterior_std(const ParticleEnsemble& e, double reference_time) {
  const auto mean = nominal_estimate(e, reference_time);
  double va = 0.0, vw = 0.0, s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double wi = e.weights[i];
    const double phase = e.particles[i].phase + e.particles[i].omega * reference_time;
    va += wi * square(e.particles[i].amplitude - mean.amplitude);
    vw += wi * square(e.particles[i].omega - mean.omega);
    s += wi * std::sin(phase);
    c += wi * std::cos(phase);
  }
  const double r = std::min(1.0, std::hypot(s, c));
  return {std::sqrt(va), r > 0.0 ? std::sqrt(-2.0 * std::log(r)) : kPi, std::sqrt(vw)};
}

ParticleEnsemble hypothetical_update(const ParticleEnsemble& ensemble,
                                     const PtoProfile& candidate,
                                     const MeasurementWindow& window,
                                     const WecParams& plant) {
  ParticleEnsemble out = ensemble;
  const auto nominal = nominal_estimate(ensemble, window.start);
  const double synthetic =
      average_power(shift_origin(candidate, window.start),
                    shift_origin(nominal, window.start), plant, window.length);
  const auto predicted = predict(out, candidate, window, plant);
  if (!reweight(out, synthetic, predicted)) out.weights = ensemble.weights;
  return out;
}

namespace {

// Successive weighted draws over the entries not yet in `out`, from a Fenwick
// tree of the remaining weights. O(log N) per draw after an O(N) build.
void fenwick_draws(std::span<const double> weights, std::size_t count, std::mt19937_64& rng,
                   std::vector<double>& scratch, std::vector<std::size_t>& out) {
  const std::size_t n = weights.size();
  scratch.assign(2 * n + 1, 0.0);
  double* tree = scratch.data();
  double* point = scratch.data() + n + 1;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) point[i] = weights[i] > 0.0 ? weights[i] : 0.0;
  for (const auto i : out) point[i] = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = point[i] > 0.0 ? point[i] : 0.0;
    tree[i + 1] += w;
    total += w;
    const std::size_t parent = (i + 1) + ((i + 1) & (~(i + 1) + 1));
    if (parent <= n) tree[parent] += tree[i + 1];
  }
  std::size_t top = 1;
  while (top * 2 <= n) top *= 2;
  auto remaining = [&] {
    double sum = 0.0;
    for (std::size_t i = n; i > 0; i -= i & (~i + 1)) sum += tree[i];
    return sum;
  };
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  while (out.size() < count) {
    std::size_t chosen = n;
    if (const double left = remaining(); left > 1e-12 * total && std::isfinite(left)) {
      double u = u01(rng) * left;
      std::size_t pos = 0;
      for (std::size_t s = top; s > 0; s >>= 1) {
        if (pos + s <= n && tree[pos + s] < u) {
          pos += s;
          u -= tree[pos];
        }
      }
      chosen = pos;
      // Rounding can land on an exhausted slot; walk to a live one.
      while (chosen < n && point[chosen] <= 0.0) ++chosen;
      if (chosen >= n) {
        chosen = std::min(pos, n - 1);
        while (chosen > 0 && point[chosen] <= 0.0) --chosen;
        if (point[chosen] <= 0.0) chosen = n;
      }
    }
    if (chosen >= n) {
      // No usable weight left: take an untaken entry uniformly.
      std::vector<std::size_t> pool;
      for (std::size_t i = 0; i < n; ++i) {
        if (point[i] >= 0.0) pool.push_back(i);
      }
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      chosen = pool[pick(rng)];
    }
    out.push_back(chosen);
    const double w = point[chosen];
    point[chosen] = -1.0;
    if (w > 0.0) {
      for (std::size_t i = chosen + 1; i <= n; i += i & (~i + 1)) tree[i] -= w;
    }
  }
}

}  // namespace

void sample_without_replacement(std::span<const double> weights, std::size_t count,
                                std::mt19937_64& rng, std::vector<double>& scratch,
                                std::vector<std::size_t>& out) {
  const std::size_t n = weights.size();
  if (count < 1 || count > n) throw DomainError("downsample count must lie in [1, N]");
  out.clear();
  // Draw from the full distribution and reject repeats: conditioned on
  // rejection this is exactly a draw from the remaining weights. Hand over
  // to the tree once repeats get frequent (mass concentrated in few entries).
  constexpr std::size_t kLinearScan = 64;
  if (count <= kLinearScan) {
    scratch.resize(n);
    double cum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cum += weights[i] > 0.0 ? weights[i] : 0.0;
      scratch[i] = cum;
    }
    if (cum > 0.0 && std::isfinite(cum)) {
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      std::size_t budget = 4 * count + 16;
      while (out.size() < count && budget-- > 0) {
        const double u = u01(rng) * cum;
        auto i = static_cast<std::size_t>(
            std::upper_bound(scratch.begin(), scratch.end(), u) - scratch.begin());
        if (i >= n) continue;
        if (std::find(out.begin(), out.end(), i) == out.end()) out.push_back(i);
      }
    }
    if (out.size() == count) return;
  }
  fenwick_draws(weights, count, rng, scratch, out);
}

std::vector<WaveParams> downsample(const ParticleEnsemble& ensemble, std::size_t count,
                                   std::mt19937_64& rng) {
  std::vector<double> scratch;
  std::vector<std::size_t> idx;
  sample_without_replacement(ensemble.weights, count, rng, scratch, idx);
  std::vector<WaveParams> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(ensemble.particles[i]);
  return out;
}

}  // namespace wec
