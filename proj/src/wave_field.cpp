#include "wecdcee/wave_field.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace wec {
namespace {

const WaveSegment& active_segment(const WaveSchedule& schedule, double t) {
  if (schedule.empty()) throw DomainError("empty wave schedule");
  if (t < schedule.front().start_time) {
    throw DomainError("time precedes the first wave segment");
  }
  auto it = std::upper_bound(schedule.begin(), schedule.end(), t,
                             [](double time, const WaveSegment& s) {
                               return time < s.start_time;
                             });
  return *std::prev(it);
}

double harmonic(const WaveParams& w, double t) {
  return w.amplitude * std::cos(w.omega * t + w.phase);
}

}  // namespace

double elevation(const WaveSchedule& schedule, double t) {
  return harmonic(active_segment(schedule, t).wave, t);
}

double elevation(const IrregularSpec& spec, double t) {
  if (spec.components.empty()) throw DomainError("empty irregular spectrum");
  double eta = 0.0;
  for (const auto& c : spec.components) eta += harmonic(c, t);
  return eta;
}

double elevation(const WaveField& field, double t) {
  return std::visit([t](const auto& f) { return elevation(f, t); }, field);
}

WaveParams dominant_component(const IrregularSpec& spec) {
  if (spec.components.empty()) throw DomainError("empty irregular spectrum");
  return *std::min_element(spec.components.begin(), spec.components.end(),
                           [](const WaveParams& a, const WaveParams& b) {
                             if (a.amplitude != b.amplitude) return a.amplitude > b.amplitude;
                             return a.omega < b.omega;
                           });
}

WaveParams reference_wave(const WaveField& field, double t) {
  if (const auto* s = std::get_if<WaveSchedule>(&field)) return active_segment(*s, t).wave;
  return dominant_component(std::get<IrregularSpec>(field));
}

std::vector<double> change_times(const WaveField& field) {
  std::vector<double> out;
  if (const auto* s = std::get_if<WaveSchedule>(&field)) {
    for (const auto& seg : *s) out.push_back(seg.start_time);
  } else {
    out.push_back(0.0);
  }
  return out;
}

void validate(const WaveField& field) {
  if (const auto* s = std::get_if<WaveSchedule>(&field)) {
    if (s->empty()) throw ConfigError("wave schedule has no segments");
    double prev = -1.0;
    for (const auto& seg : *s) {
      if (seg.start_time < 0.0 || seg.start_time <= prev) {
        throw ConfigError("wave segments must start at t >= 0 in strictly increasing order");
      }
      if (seg.wave.amplitude < 0.0 || seg.wave.omega <= 0.0) {
        throw ConfigError("wave segment needs amplitude >= 0 and omega > 0");
      }
      prev = seg.start_time;
    }
  } else {
    const auto& spec = std::get<IrregularSpec>(field);
    if (spec.components.empty()) throw ConfigError("irregular spectrum has no components");
    for (const auto& c : spec.components) {
      if (c.amplitude < 0.0 || c.omega <= 0.0) {
        throw ConfigError("irregular component needs amplitude >= 0 and omega > 0");
      }
    }
  }
}

WaveSchedule reference_schedule() {
  return {
      {0.0, {1.0, 0.0, 0.4 * kPi}},
      {10000.0, {0.7, 0.5, 0.34 * kPi}},
      {20000.0, {0.5, 0.3, 0.32 * kPi}},
      {30000.0, {1.0, 0.0, 0.4 * kPi}},
  };
}

IrregularSpec make_irregular(const WaveParams& dominant, std::uint64_t seed,
                             const IrregularOptions& options) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ratio(0.0, options.max_ratio);
  std::uniform_real_distribution<double> omega(options.omega_lo, options.omega_hi);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  IrregularSpec spec;
  spec.components.push_back(dominant);
  for (int i = 0; i < options.harmonics; ++i) {
    WaveParams c;
    c.amplitude = ratio(rng) * dominant.amplitude;
    c.omega = omega(rng);
    c.phase = phase(rng);
    spec.components.push_back(c);
  }
  return spec;
}

}  // namespace wec
