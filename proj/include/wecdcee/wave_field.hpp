// Ocean elevation signals: piecewise regular-wave schedules and
// multi-harmonic irregular seas.
#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "wecdcee/types.hpp"

namespace wec {

/// A regular wave that takes over at `start_time` (absolute time, no phase
/// re-stitching at the switch).
struct WaveSegment {
  double start_time = 0.0;
  WaveParams wave;
};

using WaveSchedule = std::vector<WaveSegment>;

/// Linear superposition of harmonic components.
struct IrregularSpec {
  std::vector<WaveParams> components;
};

using WaveField = std::variant<WaveSchedule, IrregularSpec>;

double elevation(const WaveSchedule& schedule, double t);
double elevation(const IrregularSpec& spec, double t);
double elevation(const WaveField& field, double t);

/// Largest-amplitude component; ties go to the lowest frequency.
WaveParams dominant_component(const IrregularSpec& spec);

/// Regular wave active at time t (the dominant component for irregular seas).
WaveParams reference_wave(const WaveField& field, double t);

/// Times at which the reference wave changes, starting with the first segment.
std::vector<double> change_times(const WaveField& field);

/// Throws ConfigError unless segments are non-empty, start at t >= 0 and are
/// strictly increasing, or the irregular spec is non-empty.
void validate(const WaveField& field);

/// Regular wave cos(0.4 pi t) with step changes at 1e4, 2e4 and 3e4 seconds.
WaveSchedule reference_schedule();

/// Seeded synthetic sea: the given dominant component plus `harmonics`
/// secondary components with amplitudes up to `max_ratio` of the dominant,
/// frequencies uniform in [omega_lo, omega_hi] and phases uniform in [0, 2 pi).
struct IrregularOptions {
  int harmonics = 4;
  double max_ratio = 0.4;
  double omega_lo = 0.2 * kPi;
  double omega_hi = 0.6 * kPi;
};

IrregularSpec make_irregular(const WaveParams& dominant, std::uint64_t seed,
                             const IrregularOptions& options = {});

}  // namespace wec
