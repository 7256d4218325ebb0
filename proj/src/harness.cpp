#include "wecdcee/harness.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

namespace wec {
namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Independent, seed-derived RNG streams for the loop's random consumers.
enum Stream : std::uint64_t { kMeasurementNoise = 1, kFilter = 2, kController = 3 };

std::uint64_t stream_seed(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint64_t out[1];
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  out[0] = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
  return out[0];
}

std::size_t whole_steps(double seconds, double dt) {
  return static_cast<std::size_t>(std::floor(seconds / dt + 1e-9));
}

// ---------------------------------------------------------------------------
// Scenario file format

using Tokens = std::vector<std::string>;

double to_double(const std::string& key, const std::string& tok) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || tok.empty()) {
    throw ConfigError("'" + key + "': not a number: '" + tok + "'");
  }
  return v;
}

std::vector<double> numbers(const std::string& key, const Tokens& t, std::size_t min,
                            std::size_t max) {
  if (t.size() < min || t.size() > max) {
    throw ConfigError("'" + key + "': expected " + std::to_string(min) +
                      (min == max ? "" : "-" + std::to_string(max)) + " values");
  }
  std::vector<double> out;
  for (const auto& s : t) out.push_back(to_double(key, s));
  return out;
}

double one(const std::string& key, const Tokens& t) { return numbers(key, t, 1, 1)[0]; }

std::size_t count(const std::string& key, const Tokens& t) {
  const double v = one(key, t);
  if (!(v >= 0.0) || v != std::floor(v)) throw ConfigError("'" + key + "': expected a count");
  return static_cast<std::size_t>(v);
}

bool boolean(const std::string& key, const Tokens& t) {
  if (t.size() == 1 && (t[0] == "true" || t[0] == "1")) return true;
  if (t.size() == 1 && (t[0] == "false" || t[0] == "0")) return false;
  throw ConfigError("'" + key + "': expected true or false");
}

Interval interval(const std::string& key, const Tokens& t) {
  const auto v = numbers(key, t, 2, 2);
  return {v[0], v[1]};
}

WaveParams triple(const std::string& key, const Tokens& t) {
  const auto v = numbers(key, t, 3, 3);
  return {v[0], v[1], v[2]};
}

PtoGains gains(const std::string& key, const Tokens& t) {
  const auto v = numbers(key, t, 2, 2);
  return {v[0], v[1]};
}

struct ParseState {
  ScenarioConfig cfg;
  WaveSchedule segments;
  std::vector<WaveParams> components;
  bool irregular_generated = false;
  bool p_max_set = false;
};

using Setter = std::function<void(ParseState&, const std::string&, const Tokens&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> m;
    auto num = [&m](const char* key, double ScenarioConfig::*field) {
      m[key] = [field](ParseState& s, const std::string& k, const Tokens& t) {
        s.cfg.*field = one(k, t);
      };
    };
    num("duration_s", &ScenarioConfig::duration);
    num("dt_s", &ScenarioConfig::dt);
    m["seed"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.cfg.seed = count(k, t);
    };
    m["controller"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      if (t.size() != 1) throw ConfigError("'" + k + "': expected one name");
      s.cfg.controller = parse_controller(t[0]);
    };
    m["plant_trace_stride"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.cfg.plant_trace_stride = count(k, t);
    };

    auto plant = [&m](const char* key, double WecParams::*field) {
      m[key] = [field](ParseState& s, const std::string& k, const Tokens& t) {
        s.cfg.plant.*field = one(k, t);
      };
    };
    plant("plant_mass_kg", &WecParams::mass);
    plant("plant_radiation_damping_kg_per_s", &WecParams::radiation_damping);
    plant("plant_stiffness_n_per_m", &WecParams::stiffness);
    plant("plant_excitation_n_per_m", &WecParams::excitation);
    plant("plant_force_limit_n", &WecParams::force_limit);
    plant("plant_heave_limit_m", &WecParams::heave_limit);
    plant("plant_velocity_limit_m_per_s", &WecParams::velocity_limit);

    auto window = [&m](const char* key, double MeasurementWindows::*field) {
      m[key] = [field](ParseState& s, const std::string& k, const Tokens& t) {
        s.cfg.windows.*field = one(k, t);
      };
    };
    window("window_t1_s", &MeasurementWindows::t1);
    window("window_t2_s", &MeasurementWindows::t2);
    window("window_t_s", &MeasurementWindows::t);
    window("measurement_noise_fraction", &MeasurementWindows::noise_fraction);

    m["wave_segment"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      const auto v = numbers(k, t, 4, 4);
      s.segments.push_back({v[0], {v[1], v[2], v[3]}});
    };
    m["wave_component"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.components.push_back(triple(k, t));
    };
    m["wave_irregular"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      const auto v = numbers(k, t, 4, 8);
      IrregularOptions opt;
      if (v.size() > 4) opt.harmonics = static_cast<int>(v[4]);
      if (v.size() > 5) opt.max_ratio = v[5];
      if (v.size() > 6) opt.omega_lo = v[6];
      if (v.size() > 7) opt.omega_hi = v[7];
      if (v[3] < 0.0 || v[3] != std::floor(v[3])) throw ConfigError("'" + k + "': seed must be a count");
      const auto spec = make_irregular({v[0], v[1], v[2]}, static_cast<std::uint64_t>(v[3]), opt);
      s.components.insert(s.components.end(), spec.components.begin(), spec.components.end());
      s.irregular_generated = true;
    };

    m["region_amplitude_m"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.cfg.region.amplitude = interval(k, t);
    };
    m["region_phase_rad"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.cfg.region.phase = interval(k, t);
    };
    m["region_omega_rad_per_s"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.cfg.region.omega = interval(k, t);
    };

    m["estimator_particles"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.cfg.estimator.particles = count(k, t);
    };
    auto est = [&m](const char* key, double EstimatorConfig::*field) {
      m[key] = [field](ParseState& s, const std::string& k, const Tokens& t) {
        s.cfg.estimator.*field = one(k, t);
      };
    };
    est("estimator_ess_threshold", &EstimatorConfig::ess_threshold);
    est("estimator_roughening_fraction", &EstimatorConfig::roughening_fraction);
    est("estimator_likelihood_fraction", &EstimatorConfig::likelihood_fraction);
    est("estimator_likelihood_floor_w", &EstimatorConfig::likelihood_floor);
    est("estimator_regeneration_fraction", &EstimatorConfig::regeneration_fraction);
    est("estimator_roughening_floor_fraction", &EstimatorConfig::roughening_floor_fraction);
    est("estimator_surprise_threshold", &EstimatorConfig::surprise_threshold);
    est("estimator_surprise_ess_fraction", &EstimatorConfig::surprise_ess_fraction);
    est("estimator_surprise_regeneration_fraction",
        &EstimatorConfig::surprise_regeneration_fraction);
    m["estimator_adaptive_roughening"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.cfg.estimator.adaptive_roughening = boolean(k, t);
    };
    m["estimator_couple_phase_jitter"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.cfg.estimator.couple_phase_jitter = boolean(k, t);
    };
    m["prior_mean"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.cfg.prior.mean = triple(k, t);
    };
    m["prior_std"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.cfg.prior.stddev = triple(k, t);
    };

    auto act = [&m](const char* key, double ActionConfig::*field) {
      m[key] = [field](ParseState& s, const std::string& k, const Tokens& t) {
        s.cfg.actions.*field = one(k, t);
      };
    };
    act("action_d_amplitude_n", &ActionConfig::d_amplitude);
    act("action_d_phase_rad", &ActionConfig::d_phase);
    act("action_d_omega_rad_per_s", &ActionConfig::d_omega);
    act("action_alpha_min", &ActionConfig::alpha_min);
    act("action_alpha_max", &ActionConfig::alpha_max);
    m["action_phase_anchor"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      if (t.size() == 1 && t[0] == "absolute") {
        s.cfg.actions.phase_anchor = PhaseAnchor::kAbsolute;
      } else if (t.size() == 1 && t[0] == "switch") {
        s.cfg.actions.phase_anchor = PhaseAnchor::kSwitch;
      } else if (t.size() == 1 && t[0] == "midpoint") {
        s.cfg.actions.phase_anchor = PhaseAnchor::kMidpoint;
      } else {
        throw ConfigError("'" + k + "': expected absolute, switch or midpoint");
      }
    };
    m["action_alpha_distribution"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      if (t.size() == 1 && t[0] == "uniform") {
        s.cfg.actions.gain_distribution = GainDistribution::kUniform;
      } else if (t.size() == 1 && t[0] == "log_uniform") {
        s.cfg.actions.gain_distribution = GainDistribution::kLogUniform;
      } else {
        throw ConfigError("'" + k + "': expected uniform or log_uniform");
      }
    };
    m["profile_amplitude_n"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.cfg.actions.bounds.amplitude = interval(k, t);
    };
    m["profile_phase_rad"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.cfg.actions.bounds.phase = interval(k, t);
    };
    m["profile_omega_rad_per_s"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.cfg.actions.bounds.omega = interval(k, t);
    };
    m["initial_profile"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      const auto w = triple(k, t);
      s.cfg.initial_profile = {w.amplitude, w.phase, w.omega};
    };

    m["dcee_p_max_w"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.cfg.dcee.p_max = one(k, t);
      s.p_max_set = true;
    };
    m["dcee_m"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.cfg.dcee.m = count(k, t);
    };
    m["dcee_q"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.cfg.dcee.q = count(k, t);
    };
    m["dcee_exploration"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.cfg.dcee.exploration = boolean(k, t);
    };
    m["dcee_exploration_form"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      if (t.size() == 1 && t[0] == "subsample") {
        s.cfg.dcee.form = ExplorationForm::kSubsample;
      } else if (t.size() == 1 && t[0] == "weighted") {
        s.cfg.dcee.form = ExplorationForm::kWeighted;
      } else {
        throw ConfigError("'" + k + "': expected subsample or weighted");
      }
    };

    m["esc_period_s"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.cfg.esc.period = one(k, t);
    };
    m["esc_initial_gains"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.cfg.esc.initial = gains(k, t);
    };
    m["esc_dither_amplitude"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.cfg.esc.dither_amplitude = gains(k, t);
    };
    m["esc_dither_frequency_hz"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      const auto v = numbers(k, t, 2, 2);
      s.cfg.esc.dither_frequency_resistive = v[0];
      s.cfg.esc.dither_frequency_reactive = v[1];
    };
    m["esc_adaptation"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.cfg.esc.adaptation = gains(k, t);
    };
    m["esc_highpass"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.cfg.esc.highpass = one(k, t);
    };
    m["esc_gain_lower"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.cfg.esc.lower = gains(k, t);
    };
    m["esc_gain_upper"] = [](ParseState& s, const std::string& k, const Tokens& t) {
      s.cfg.esc.upper = gains(k, t);
    };
    return m;
  }();
  return table;
}

// ---------------------------------------------------------------------------
// Closed loop

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string out;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ',';
    out += c;
    first = false;
  }
  out += '\n';
  return out;
}

double tail_mean(const std::vector<double>& power, std::size_t begin, std::size_t end) {
  const std::size_t n = end - begin;
  const std::size_t tail = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(n))));
  double sum = 0.0;
  for (std::size_t i = end - tail; i < end; ++i) sum += power[i];
  return sum / static_cast<double>(tail);
}

// 1-based index of the first record from which the commanded frequency stays
// within `tolerance` of the true wave frequency; -1 if it never settles.
long settle_index(const std::vector<ControllerRecord>& records, std::size_t first,
                  std::size_t last, double tolerance) {
  long settled = -1;
  for (std::size_t r = last; r > first; --r) {
    const auto& rec = records[r - 1];
    if (!(std::abs(rec.command.omega - rec.true_wave.omega) <= tolerance)) break;
    settled = static_cast<long>(r - first);
  }
  return settled;
}

}  // namespace

const char* to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kDcee: return "dcee";
    case ControllerKind::kEsc: return "esc";
    case ControllerKind::kBangBang: return "bangbang";
    case ControllerKind::kOracle: return "oracle";
    case ControllerKind::kNone: return "none";
  }
  return "?";
}

const char* to_string(PhaseAnchor anchor) {
  switch (anchor) {
    case PhaseAnchor::kAbsolute: return "absolute";
    case PhaseAnchor::kSwitch: return "switch";
    case PhaseAnchor::kMidpoint: return "midpoint";
  }
  return "?";
}

ControllerKind parse_controller(const std::string& name) {
  for (auto k : {ControllerKind::kDcee, ControllerKind::kEsc, ControllerKind::kBangBang,
                 ControllerKind::kOracle, ControllerKind::kNone}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("unknown controller '" + name + "'");
}

void ScenarioConfig::validate() const {
  plant.validate();
  wec::validate(wave);
  windows.validate(dt);
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(duration >= windows.t)) throw ConfigError("duration must cover at least one window T");
  if (plant_trace_stride == 0) throw ConfigError("plant trace stride must be >= 1");
  if (controller == ControllerKind::kDcee) {
    region.validate();
    estimator.validate();
    actions.validate();
    dcee.validate(estimator.particles);
    if (dcee.horizon != windows.t) throw ConfigError("planning window must equal window T");
    if (!within_bounds(initial_profile, actions.bounds)) {
      throw ConfigError("initial profile lies outside the profile bounds");
    }
  }
  if (controller == ControllerKind::kEsc) esc.validate();
}

ScenarioConfig parse_scenario(std::istream& in) {
  ParseState st;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    std::istringstream lhs(line.substr(0, eq == std::string::npos ? line.size() : eq));
    std::string key, extra;
    lhs >> key >> extra;
    if (key.empty()) continue;
    if (eq == std::string::npos || !extra.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    Tokens tokens;
    std::istringstream rhs(line.substr(eq + 1));
    for (std::string tok; rhs >> tok;) tokens.push_back(tok);
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    it->second(st, key, tokens);
  }
  if (!st.segments.empty() && !st.components.empty()) {
    throw ConfigError("a scenario takes wave_segment or wave_component/wave_irregular, not both");
  }
  if (!st.segments.empty()) {
    st.cfg.wave = st.segments;
  } else if (!st.components.empty()) {
    st.cfg.wave = IrregularSpec{st.components};
  }
  st.cfg.dcee.horizon = st.cfg.windows.t;
  if (!st.p_max_set) st.cfg.dcee.p_max = default_p_max(st.cfg.region, st.cfg.plant);
  st.cfg.validate();
  return st.cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  try {
    return parse_scenario(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_scenario(std::ostream& out, const ScenarioConfig& c) {
  auto kv = [&out](const char* key, std::initializer_list<double> values) {
    out << key << " =";
    for (double v : values) out << ' ' << fmt(v);
    out << '\n';
  };
  out << "controller = " << to_string(c.controller) << '\n';
  out << "seed = " << c.seed << '\n';
  kv("duration_s", {c.duration});
  kv("dt_s", {c.dt});
  out << "plant_trace_stride = " << c.plant_trace_stride << '\n';
  kv("plant_mass_kg", {c.plant.mass});
  kv("plant_radiation_damping_kg_per_s", {c.plant.radiation_damping});
  kv("plant_stiffness_n_per_m", {c.plant.stiffness});
  kv("plant_excitation_n_per_m", {c.plant.excitation});
  kv("plant_force_limit_n", {c.plant.force_limit});
  kv("plant_heave_limit_m", {c.plant.heave_limit});
  kv("plant_velocity_limit_m_per_s", {c.plant.velocity_limit});
  kv("window_t1_s", {c.windows.t1});
  kv("window_t2_s", {c.windows.t2});
  kv("window_t_s", {c.windows.t});
  kv("measurement_noise_fraction", {c.windows.noise_fraction});
  if (const auto* s = std::get_if<WaveSchedule>(&c.wave)) {
    for (const auto& seg : *s) {
      kv("wave_segment", {seg.start_time, seg.wave.amplitude, seg.wave.phase, seg.wave.omega});
    }
  } else {
    for (const auto& w : std::get<IrregularSpec>(c.wave).components) {
      kv("wave_component", {w.amplitude, w.phase, w.omega});
    }
  }
  kv("region_amplitude_m", {c.region.amplitude.lo, c.region.amplitude.hi});
  kv("region_phase_rad", {c.region.phase.lo, c.region.phase.hi});
  kv("region_omega_rad_per_s", {c.region.omega.lo, c.region.omega.hi});
  out << "estimator_particles = " << c.estimator.particles << '\n';
  kv("estimator_ess_threshold", {c.estimator.ess_threshold});
  kv("estimator_roughening_fraction", {c.estimator.roughening_fraction});
  kv("estimator_likelihood_fraction", {c.estimator.likelihood_fraction});
  kv("estimator_likelihood_floor_w", {c.estimator.likelihood_floor});
  kv("estimator_regeneration_fraction", {c.estimator.regeneration_fraction});
  out << "estimator_couple_phase_jitter = " << (c.estimator.couple_phase_jitter ? "true" : "false") << '\n';
  out << "estimator_adaptive_roughening = " << (c.estimator.adaptive_roughening ? "true" : "false")
      << '\n';
  kv("estimator_roughening_floor_fraction", {c.estimator.roughening_floor_fraction});
  kv("estimator_surprise_threshold", {c.estimator.surprise_threshold});
  kv("estimator_surprise_ess_fraction", {c.estimator.surprise_ess_fraction});
  kv("estimator_surprise_regeneration_fraction", {c.estimator.surprise_regeneration_fraction});
  kv("prior_mean", {c.prior.mean.amplitude, c.prior.mean.phase, c.prior.mean.omega});
  kv("prior_std", {c.prior.stddev.amplitude, c.prior.stddev.phase, c.prior.stddev.omega});
  kv("action_d_amplitude_n", {c.actions.d_amplitude});
  kv("action_d_phase_rad", {c.actions.d_phase});
  kv("action_d_omega_rad_per_s", {c.actions.d_omega});
  kv("action_alpha_min", {c.actions.alpha_min});
  kv("action_alpha_max", {c.actions.alpha_max});
  out << "action_alpha_distribution = "
      << (c.actions.gain_distribution == GainDistribution::kUniform ? "uniform" : "log_uniform")
      << '\n';
  out << "action_phase_anchor = " << to_string(c.actions.phase_anchor) << '\n';
  kv("profile_amplitude_n", {c.actions.bounds.amplitude.lo, c.actions.bounds.amplitude.hi});
  kv("profile_phase_rad", {c.actions.bounds.phase.lo, c.actions.bounds.phase.hi});
  kv("profile_omega_rad_per_s", {c.actions.bounds.omega.lo, c.actions.bounds.omega.hi});
  kv("initial_profile", {c.initial_profile.amplitude, c.initial_profile.phase, c.initial_profile.omega});
  kv("dcee_p_max_w", {c.dcee.p_max});
  out << "dcee_m = " << c.dcee.m << '\n';
  out << "dcee_q = " << c.dcee.q << '\n';
  out << "dcee_exploration = " << (c.dcee.exploration ? "true" : "false") << '\n';
  out << "dcee_exploration_form = "
      << (c.dcee.form == ExplorationForm::kSubsample ? "subsample" : "weighted") << '\n';
  kv("esc_period_s", {c.esc.period});
  kv("esc_initial_gains", {c.esc.initial.resistive, c.esc.initial.reactive});
  kv("esc_dither_amplitude", {c.esc.dither_amplitude.resistive, c.esc.dither_amplitude.reactive});
  kv("esc_dither_frequency_hz", {c.esc.dither_frequency_resistive, c.esc.dither_frequency_reactive});
  kv("esc_adaptation", {c.esc.adaptation.resistive, c.esc.adaptation.reactive});
  kv("esc_highpass", {c.esc.highpass});
  kv("esc_gain_lower", {c.esc.lower.resistive, c.esc.lower.reactive});
  kv("esc_gain_upper", {c.esc.upper.resistive, c.esc.upper.reactive});
}

RunResult run_scenario(const ScenarioConfig& cfg, const RunOutputs& outputs) {
  const auto wall_start = std::chrono::steady_clock::now();
  cfg.validate();
  const auto& plant = cfg.plant;
  const double dt = cfg.dt;
  const std::size_t total_steps = whole_steps(cfg.duration, dt);
  const std::size_t window_steps = steps_in(cfg.windows.t, dt);

  std::ofstream plant_csv;
  std::ofstream controller_csv;
  if (outputs.directory) {
    std::filesystem::create_directories(*outputs.directory);
    plant_csv.open(*outputs.directory / "plant_trace.csv");
    controller_csv.open(*outputs.directory / "controller_trace.csv");
    if (!plant_csv || !controller_csv) throw ConfigError("cannot create output files");
    plant_csv << "t_s,eta_m,x_m,v_m_per_s,force_n,power_w,heave_violation,velocity_violation\n";
  }

  const auto eta = [&wave = cfg.wave](double t) { return elevation(wave, t); };

  std::mt19937_64 noise_rng(stream_seed(cfg.seed, kMeasurementNoise));
  std::optional<ControllerState> dcee;
  if (cfg.controller == ControllerKind::kDcee) {
    dcee.emplace();
    dcee->current = cfg.initial_profile;
    dcee->ensemble = init_ensemble(cfg.prior, cfg.estimator, cfg.region,
                                   stream_seed(cfg.seed, kFilter));
    dcee->rng.seed(stream_seed(cfg.seed, kController));
  }
  PtoProfile profile = cfg.initial_profile;
  if (cfg.controller == ControllerKind::kOracle) profile = oracle_profile(reference_wave(cfg.wave, 0.0), plant);
  if (cfg.controller == ControllerKind::kNone) profile = {0.0, 0.0, 1.0};
  EscState esc;
  std::size_t esc_steps = 0;
  double esc_sum = 0.0;
  if (cfg.controller == ControllerKind::kEsc) {
    esc = esc_init(cfg.esc);
    esc_steps = steps_in(cfg.esc.period, dt);
  }

  auto force_at = [&](double t, double x, double v) -> double {
    switch (cfg.controller) {
      case ControllerKind::kBangBang:
        return bang_bang_force({x, v, t}, plant.force_limit);
      case ControllerKind::kEsc:
        return feedback_force(esc.applied, x, v);
      case ControllerKind::kNone:
        return 0.0;
      default:
        return profile.amplitude * std::cos(profile.omega * t + profile.phase);
    }
  };

  RunResult result;
  result.metrics.controller = to_string(cfg.controller);
  result.metrics.duration = static_cast<double>(total_steps) * dt;
  std::vector<double> power(total_steps);
  PowerTrace trace(window_steps, dt);
  WecState s;
  double energy = 0.0;

  for (std::size_t k = 0; k < total_steps; ++k) {
    s = step(s, plant, eta, force_at, dt);
    // Rebase time on the step count so it never accumulates rounding.
    s.t = static_cast<double>(k + 1) * dt;
    const double f = saturate_force(force_at(s.t, s.x, s.v), plant);
    const double p = instantaneous_power(s, f);
    power[k] = p;
    energy += p * dt;
    const auto flags = check_limits(s, plant);
    result.metrics.heave_violations += flags.heave;
    result.metrics.velocity_violations += flags.velocity;
    trace.push(p);
    if (plant_csv.is_open() && k % cfg.plant_trace_stride == 0) {
      plant_csv << csv_row({fmt(s.t), fmt(eta(s.t)), fmt(s.x), fmt(s.v), fmt(f), fmt(p),
                            flags.heave ? "1" : "0", flags.velocity ? "1" : "0"});
    }

    if (cfg.controller == ControllerKind::kEsc) {
      esc_sum += p;
      if ((k + 1) % esc_steps == 0) {
        esc = esc_step(esc, esc_sum / static_cast<double>(esc_steps), cfg.esc);
        esc_sum = 0.0;
      }
    }

    if ((k + 1) % window_steps != 0) continue;
    ControllerRecord rec;
    rec.step = result.records.size() + 1;
    rec.time = s.t;
    rec.measured = windowed_measurements(trace, cfg.windows, noise_rng);
    rec.true_wave = reference_wave(cfg.wave, s.t);
    switch (cfg.controller) {
      case ControllerKind::kDcee: {
        const auto out = controller_step(
            *dcee, {s.t, rec.measured.t1, rec.measured.t2, rec.measured.t},
            {cfg.windows.t1, cfg.windows.t2, cfg.windows.t}, plant, cfg.dcee, cfg.actions);
        profile = out.command;
        rec.selected = out.selection.index;
        rec.alpha = out.selection.alpha;
        rec.cost = out.selection.costs[out.selection.index];
        rec.nominal = out.nominal;
        rec.spread = out.spread;
        rec.ess = dcee->ensemble.last.ess;
        break;
      }
      case ControllerKind::kOracle:
        profile = oracle_profile(rec.true_wave, plant);
        break;
      case ControllerKind::kEsc:
        rec.gains = esc.applied;
        break;
      default:
        break;
    }
    rec.command = profile;
    result.records.push_back(rec);
  }
  if (dcee) result.metrics.filter_underflows = dcee->ensemble.underflow_count;

  auto& m = result.metrics;
  m.high_level_steps = result.records.size();
  m.energy = energy;
  m.mean_power = total_steps ? energy / (static_cast<double>(total_steps) * dt) : 0.0;
  m.trailing_mean_power = total_steps ? tail_mean(power, 0, total_steps) : 0.0;
  const bool tracks_frequency =
      cfg.controller == ControllerKind::kDcee || cfg.controller == ControllerKind::kOracle;
  const double tolerance = 2.0 * cfg.actions.d_omega * (1.0 + 1e-9);
  if (tracks_frequency) m.convergence_step = settle_index(result.records, 0, result.records.size(), tolerance);

  const auto starts = change_times(cfg.wave);
  for (std::size_t i = 0; i < starts.size(); ++i) {
    SegmentMetrics seg;
    seg.start = starts[i];
    seg.end = i + 1 < starts.size() ? starts[i + 1] : m.duration;
    if (seg.start >= m.duration) break;
    seg.end = std::min(seg.end, m.duration);
    seg.wave = reference_wave(cfg.wave, seg.start);
    seg.feasible_optimum = feasible_optimal_power(seg.wave, plant);
    const std::size_t b = whole_steps(seg.start, dt);
    const std::size_t e = std::min(total_steps, whole_steps(seg.end, dt));
    if (e > b) seg.trailing_mean_power = tail_mean(power, b, e);
    if (tracks_frequency) {
      std::size_t first = 0;
      while (first < result.records.size() && result.records[first].time < seg.start) ++first;
      std::size_t last = first;
      while (last < result.records.size() && result.records[last].time < seg.end) ++last;
      seg.convergence_step = settle_index(result.records, first, last, tolerance);
    }
    result.segments.push_back(seg);
  }

  m.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  if (outputs.directory) {
    write_controller_trace_csv(controller_csv, result.records);
    std::ofstream metrics_csv(*outputs.directory / "metrics.csv");
    write_metrics_csv(metrics_csv, result);
  }
  return result;
}

void write_metrics_csv(std::ostream& out, const RunResult& r) {
  out << "scope,start_s,end_s,controller,high_level_steps,mean_power_w,trailing_mean_power_w,"
         "energy_j,convergence_step,feasible_optimum_w,heave_violations,velocity_violations,"
         "filter_underflows\n";
  const auto& m = r.metrics;
  out << csv_row({"run", fmt(0.0), fmt(m.duration), m.controller,
                  std::to_string(m.high_level_steps), fmt(m.mean_power),
                  fmt(m.trailing_mean_power), fmt(m.energy), std::to_string(m.convergence_step),
                  "", std::to_string(m.heave_violations), std::to_string(m.velocity_violations),
                  std::to_string(m.filter_underflows)});
  for (std::size_t i = 0; i < r.segments.size(); ++i) {
    const auto& s = r.segments[i];
    out << csv_row({"segment" + std::to_string(i + 1), fmt(s.start), fmt(s.end), m.controller,
                    "", "", fmt(s.trailing_mean_power), "", std::to_string(s.convergence_step),
                    fmt(s.feasible_optimum), "", "", ""});
  }
}

void write_controller_trace_csv(std::ostream& out, const std::vector<ControllerRecord>& records) {
  out << "step,t_s,amplitude_u_n,phase_u_rad,omega_u_rad_per_s,gain_resistive_kg_per_s,"
         "gain_reactive_n_per_m,selected,alpha,exploitation_w2,exploration_w2,"
         "amplitude_hat_m,phase_hat_rad,omega_hat_rad_per_s,amplitude_std_m,phase_std_rad,"
         "omega_std_rad_per_s,true_amplitude_m,true_phase_rad,true_omega_rad_per_s,"
         "power_t1_w,power_t2_w,power_t_w,ess\n";
  for (const auto& r : records) {
    out << csv_row({std::to_string(r.step), fmt(r.time), fmt(r.command.amplitude),
                    fmt(r.command.phase), fmt(r.command.omega), fmt(r.gains.resistive),
                    fmt(r.gains.reactive), std::to_string(r.selected), fmt(r.alpha),
                    fmt(r.cost.exploitation), fmt(r.cost.exploration), fmt(r.nominal.amplitude),
                    fmt(r.nominal.phase), fmt(r.nominal.omega), fmt(r.spread.amplitude),
                    fmt(r.spread.phase), fmt(r.spread.omega), fmt(r.true_wave.amplitude),
                    fmt(r.true_wave.phase), fmt(r.true_wave.omega), fmt(r.measured.t1),
                    fmt(r.measured.t2), fmt(r.measured.t), fmt(r.ess)});
  }
}

void write_comparison_csv(std::ostream& out, const std::vector<RunResult>& results) {
  out << "controller,mean_power_w,trailing_mean_power_w,energy_j,convergence_step,"
         "heave_violations,velocity_violations,rank_by_trailing_power\n";
  for (const auto& r : results) {
    std::size_t rank = 1;
    for (const auto& other : results) {
      if (other.metrics.trailing_mean_power > r.metrics.trailing_mean_power) ++rank;
    }
    const auto& m = r.metrics;
    out << csv_row({m.controller, fmt(m.mean_power), fmt(m.trailing_mean_power), fmt(m.energy),
                    std::to_string(m.convergence_step), std::to_string(m.heave_violations),
                    std::to_string(m.velocity_violations), std::to_string(rank)});
  }
}

namespace {

bool same_wave(const WaveField& a, const WaveField& b) {
  if (a.index() != b.index()) return false;
  if (const auto* sa = std::get_if<WaveSchedule>(&a)) {
    const auto& sb = std::get<WaveSchedule>(b);
    if (sa->size() != sb.size()) return false;
    for (std::size_t i = 0; i < sa->size(); ++i) {
      if ((*sa)[i].start_time != sb[i].start_time || !((*sa)[i].wave == sb[i].wave)) return false;
    }
    return true;
  }
  return std::get<IrregularSpec>(a).components == std::get<IrregularSpec>(b).components;
}

}  // namespace

std::vector<RunResult> compare_controllers(const std::vector<ScenarioConfig>& configs,
                                           const RunOutputs& outputs) {
  if (configs.empty()) throw ConfigError("compare needs at least one config");
  const auto& ref = configs.front();
  for (const auto& c : configs) {
    if (c.seed != ref.seed || !same_wave(c.wave, ref.wave)) {
      throw ConfigError("compared configs must share the wave and the seed");
    }
    if (c.duration != ref.duration || c.dt != ref.dt) {
      throw ConfigError("compared configs must share duration and dt");
    }
  }
  std::vector<RunResult> results;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    RunOutputs sub;
    if (outputs.directory) {
      sub.directory = *outputs.directory / (std::to_string(i + 1) + "_" + to_string(configs[i].controller));
    }
    results.push_back(run_scenario(configs[i], sub));
  }
  if (outputs.directory) {
    std::ofstream out(*outputs.directory / "comparison.csv");
    write_comparison_csv(out, results);
  }
  return results;
}

double simulated_average_power(const PtoProfile& u, const WaveParams& w, const WecParams& plant,
                               double duration, double dt, double preroll_periods) {
  const double slowest = std::min(u.omega, w.omega);
  const std::size_t pre = static_cast<std::size_t>(std::ceil(preroll_periods * kTwoPi / slowest / dt));
  const std::size_t n = steps_in(duration, dt);
  auto eta = [&w](double t) { return w.amplitude * std::cos(w.omega * t + w.phase); };
  auto force = [&u](double t, double, double) {
    return u.amplitude * std::cos(u.omega * t + u.phase);
  };
  const double t0 = -static_cast<double>(pre) * dt;
  WecState s{0.0, 0.0, t0};
  for (std::size_t k = 0; k < pre; ++k) {
    s = step(s, plant, eta, force, dt);
    s.t = t0 + static_cast<double>(k + 1) * dt;
  }
  s.t = 0.0;
  auto power = [&](const WecState& st) {
    return instantaneous_power(st, saturate_force(force(st.t, st.x, st.v), plant));
  };
  // Trapezoid rule over [0, duration].
  double sum = 0.5 * power(s);
  for (std::size_t k = 0; k < n; ++k) {
    s = step(s, plant, eta, force, dt);
    s.t = static_cast<double>(k + 1) * dt;
    sum += k + 1 == n ? 0.5 * power(s) : power(s);
  }
  return sum / static_cast<double>(n);
}

SuiteReport validate_oracle_equivalence(std::size_t cases, std::uint64_t seed, double tolerance) {
  SuiteReport rep;
  rep.name = "oracle-equivalence";
  const WecParams plant;
  const ProfileBounds bounds;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto draw = [&](const Interval& i) { return i.lo + i.width() * u01(rng); };
  const ConstraintRegion region;
  // Wave frequencies share the profile's lower bound; slower seas would need
  // impractically long pre-rolls.
  const Interval wave_omega{bounds.omega.lo, region.omega.hi};
  for (std::size_t c = 0; c < cases; ++c) {
    const PtoProfile u{draw(bounds.amplitude), draw(bounds.phase), draw(bounds.omega)};
    const WaveParams w{draw(region.amplitude), draw(region.phase), draw(wave_omega)};
    const double closed = average_power(u, w, plant, 50.0);
    const double sim = simulated_average_power(u, w, plant, 50.0, 0.01);
    const double rel = std::abs(sim - closed) / std::abs(closed);
    ++rep.cases;
    rep.worst = std::max(rep.worst, rel);
    if (!(rel <= tolerance)) {
      ++rep.failures;
      rep.messages.push_back("case " + std::to_string(c) + ": closed form " + fmt(closed) +
                             " W vs simulated " + fmt(sim) + " W");
    }
  }
  return rep;
}

SuiteReport validate_analytic_optimum(std::size_t cases, std::uint64_t seed) {
  SuiteReport rep;
  rep.name = "analytic-optimum";
  const WecParams plant;
  const ActionConfig steps;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(0.1, 2.5), phase(-2.0, 2.0), omega(0.2 * kPi, 0.6 * kPi);
  constexpr int kReach = 60;
  for (std::size_t c = 0; c < cases; ++c) {
    const WaveParams w{amp(rng), phase(rng), omega(rng)};
    const auto best = optimal_profile(w, plant);
    const double best_power = steady_average_power(best, w, plant);
    double excess = 0.0;
    // Amplitude and phase at the wave frequency, against the long-run power.
    for (int i = -kReach; i <= kReach; ++i) {
      for (int j = -kReach; j <= kReach; ++j) {
        const PtoProfile u{std::max(0.0, best.amplitude + i * steps.d_amplitude * 10.0),
                           best.phase + j * steps.d_phase * 10.0, w.omega};
        excess = std::max(excess, steady_average_power(u, w, plant) - best_power);
        const PtoProfile fine{std::max(0.0, best.amplitude + i * steps.d_amplitude),
                              best.phase + j * steps.d_phase, w.omega};
        excess = std::max(excess, steady_average_power(fine, w, plant) - best_power);
      }
    }
    // Frequency, over a window spanning whole wave periods so the optimum
    // carries no residue.
    const double window = std::round(1000.0 * w.omega / kTwoPi) * kTwoPi / w.omega;
    const double anchored = average_power(best, w, plant, window);
    for (int k = -kReach; k <= kReach; ++k) {
      for (int i = -3; i <= 3; ++i) {
        for (int j = -3; j <= 3; ++j) {
          const PtoProfile u{best.amplitude + i * steps.d_amplitude, best.phase + j * steps.d_phase,
                             w.omega + k * steps.d_omega};
          excess = std::max(excess, average_power(u, w, plant, window) - anchored);
        }
      }
    }
    ++rep.cases;
    const double rel = excess / best_power;
    rep.worst = std::max(rep.worst, rel);
    if (rel > 1e-9) {
      ++rep.failures;
      rep.messages.push_back("wave " + std::to_string(c) + ": grid point beats the optimum by " +
                             fmt(excess) + " W");
    }
  }
  return rep;
}

}  // namespace wec
