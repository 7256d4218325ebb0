// Acceptance runner: one criterion per invocation, one PASS/FAIL line on
// stdout followed by per-seed detail. Exit status 0 only on PASS.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <string>

#include "small_instances.hpp"
#include "wecdcee/harness.hpp"

using namespace wec;

namespace {

const std::filesystem::path kConfigs = WECDCEE_CONFIG_DIR;
constexpr int kSeeds = 10;
constexpr double kWaveOmega = 0.4 * kPi;

struct Verdict {
  bool pass = false;
  std::string summary;
};

std::string format(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ScenarioConfig scenario(const char* file, std::uint64_t seed) {
  auto cfg = load_scenario(kConfigs / file);
  cfg.seed = seed;
  return cfg;
}

Verdict closed_form_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = validate_oracle_equivalence(100, 2024, 0.02);
  const double wall = seconds_since(t0);
  for (const auto& m : rep.messages) std::printf("  %s\n", m.c_str());
  return {rep.passed() && rep.cases == 100 && wall < 60.0,
          format("%zu/%zu pairs within 2%% (worst %.3g), %.1f s", rep.cases - rep.failures,
                 rep.cases, rep.worst, wall)};
}

Verdict analytic_optimum() {
  const auto rep = validate_analytic_optimum(20, 2024);
  for (const auto& m : rep.messages) std::printf("  %s\n", m.c_str());
  const WecParams plant;
  const WaveParams wave{1.0, 0.0, kWaveOmega};
  const double closed = optimal_average_power(wave, plant);
  WecParams unclamped = plant;
  unclamped.force_limit = 1e12;
  const double simulated =
      simulated_average_power(optimal_profile(wave, plant), wave, unclamped, 50.0, 0.01);
  const bool exact = std::abs(closed - 250.0) <= 1e-12 * 250.0;
  const bool sim_ok = std::abs(simulated / 250.0 - 1.0) < 0.02;
  return {rep.passed() && exact && sim_ok,
          format("grid excess %.3g over %zu waves; optimum %.12f W; simulated %.4f W",
                 rep.worst, rep.cases, closed, simulated)};
}

Verdict filter_convergence() {
  int good = 0;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    auto cfg = scenario("dcee_regular.cfg", seed);
    cfg.duration = 50.0 * cfg.windows.t;
    const auto r = run_scenario(cfg);
    long first = -1;
    for (std::size_t i = 0; i < r.records.size() && first < 0; ++i) {
      if (std::abs(r.records[i].nominal.omega / kWaveOmega - 1.0) < 0.01) first = static_cast<long>(i + 1);
    }
    const double last_err = r.records.back().nominal.omega / kWaveOmega - 1.0;
    good += first > 0;
    std::printf("  seed %d: first within 1%% at step %ld, error at step 50 %+.4f\n", seed, first,
                last_err);
  }
  return {good >= 9, format("%d/%d seeds reach 1%% within 50 steps (need 9)", good, kSeeds)};
}

Verdict closed_loop_performance() {
  int good = 0;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    const auto r = run_scenario(scenario("dcee_reference.cfg", seed));
    bool ok = true;
    std::string line;
    for (std::size_t i = 0; i < r.segments.size(); ++i) {
      const auto& s = r.segments[i];
      const double ratio = s.trailing_mean_power / s.feasible_optimum;
      const bool seg_ok = ratio >= 0.85 && s.convergence_step >= 0 && s.convergence_step <= 150;
      ok = ok && seg_ok;
      line += format(" [%.0f%% of %.1f W, settled %ld]", 100.0 * ratio, s.feasible_optimum,
                     s.convergence_step);
    }
    good += ok;
    std::printf("  seed %d: %s%s\n", seed, ok ? "ok  " : "miss", line.c_str());
  }
  return {good >= 8, format("%d/%d seeds meet 85%% and 150 steps in every segment (need 8)", good,
                            kSeeds)};
}

Verdict bang_bang_ordering() {
  int good = 0;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    const auto dcee = scenario("dcee_regular.cfg", seed);
    auto bang = dcee;
    bang.controller = ControllerKind::kBangBang;
    const auto rows = compare_controllers({dcee, bang});
    const double p_dcee = rows[0].metrics.trailing_mean_power;
    const double p_bang = rows[1].metrics.trailing_mean_power;
    good += p_dcee > p_bang;
    std::printf("  seed %d: dcee %.2f W, bang-bang %.2f W\n", seed, p_dcee, p_bang);
  }
  return {good == kSeeds, format("dcee ahead on %d/%d seeds (need all)", good, kSeeds)};
}

Verdict irregular_robustness() {
  int good = 0;
  const WaveParams dominant{1.0, 0.0, kWaveOmega};
  for (int seed = 1; seed <= kSeeds; ++seed) {
    auto dcee = scenario("dcee_irregular.cfg", seed);
    dcee.wave = make_irregular(dominant, seed);
    auto bang = dcee;
    bang.controller = ControllerKind::kBangBang;
    const auto rows = compare_controllers({dcee, bang});
    const auto& m = rows[0].metrics;
    const double omega_u = rows[0].records.back().command.omega;
    const bool ok = m.convergence_step >= 0 &&
                    m.trailing_mean_power > rows[1].metrics.trailing_mean_power;
    good += ok;
    std::printf("  seed %d: omega_u %.4f (settled %ld), dcee %.2f W, bang-bang %.2f W\n", seed,
                omega_u, m.convergence_step, m.trailing_mean_power,
                rows[1].metrics.trailing_mean_power);
  }
  return {good >= 8,
          format("%d/%d seeds settle on the dominant frequency and beat bang-bang (need 8)", good,
                 kSeeds)};
}

long steps_to_confidence(const RunResult& r) {
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    if (r.records[i].spread.omega < 0.01) return static_cast<long>(i + 1);
  }
  return -1;
}

Verdict exploration_value() {
  int good = 0;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    const auto explore = scenario("dcee_regular.cfg", seed);
    auto exploit = explore;
    exploit.dcee.exploration = false;
    const long with = steps_to_confidence(run_scenario(explore));
    const long without = steps_to_confidence(run_scenario(exploit));
    const bool ok = with > 0 && (without < 0 || with < without);
    good += ok;
    std::printf("  seed %d: std < 0.01 after %ld steps with exploration, %ld without\n", seed,
                with, without);
  }
  return {good >= 7, format("exploration faster on %d/%d paired seeds (need 7)", good, kSeeds)};
}

Verdict small_instance_oracles() {
  const auto bayes = small::bayes_ten_particles();
  bool enumeration = true;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto e = small::select_two_particles(seed);
    enumeration = enumeration && e.check.ok;
    worst = std::max(worst, e.check.worst);
    if (!e.check.ok) {
      std::printf("  rng seed %llu: selected %zu, enumeration %zu\n",
                  static_cast<unsigned long long>(seed), e.got_index, e.expected_index);
    }
  }
  const auto sub = small::two_particle_cost(ExplorationForm::kSubsample);
  const auto weighted = small::two_particle_cost(ExplorationForm::kWeighted);
  std::printf("  (a) bayes %s worst %.2g\n  (b) enumeration %s worst %.2g\n"
              "  (c) cost %s/%s worst %.2g/%.2g\n",
              bayes.ok ? "ok" : "miss", bayes.worst, enumeration ? "ok" : "miss", worst,
              sub.ok ? "ok" : "miss", weighted.ok ? "ok" : "miss", sub.worst, weighted.worst);
  return {bayes.ok && enumeration && sub.ok && weighted.ok,
          format("bayes %s, enumeration %s, two-particle cost %s", bayes.ok ? "ok" : "miss",
                 enumeration ? "ok" : "miss", sub.ok && weighted.ok ? "ok" : "miss")};
}

bool same_records(const RunResult& a, const RunResult& b) {
  if (a.records.size() != b.records.size() || a.metrics.energy != b.metrics.energy) return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto& x = a.records[i];
    const auto& y = b.records[i];
    if (!(x.command == y.command) || !(x.nominal == y.nominal) || x.selected != y.selected ||
        x.alpha != y.alpha || x.measured.t != y.measured.t) {
      return false;
    }
  }
  return true;
}

Verdict performance_envelope() {
  const auto cfg = scenario("dcee_reference.cfg", 1);
  const bool reference_size = cfg.duration == 40000.0 && cfg.dt == 0.01 &&
                              cfg.estimator.particles == 5000 && cfg.dcee.m == 50 &&
                              cfg.dcee.q == 20;
  const auto first = run_scenario(cfg);
  const auto second = run_scenario(cfg);
  const bool repeat = same_records(first, second);
  const double wall = std::max(first.metrics.wall_seconds, second.metrics.wall_seconds);
  return {reference_size && repeat && wall < 300.0,
          format("%zu steps in %.1f s (limit 300 s), repeat %s", first.metrics.high_level_steps,
                 wall, repeat ? "identical" : "DIFFERS")};
}

const std::map<std::string, std::function<Verdict()>>& criteria() {
  static const std::map<std::string, std::function<Verdict()>> table{
      {"c1_closed_form_equivalence", closed_form_equivalence},
      {"c2_analytic_optimum", analytic_optimum},
      {"c3_filter_convergence", filter_convergence},
      {"c4_closed_loop_performance", closed_loop_performance},
      {"c5_bang_bang_ordering", bang_bang_ordering},
      {"c6_irregular_robustness", irregular_robustness},
      {"c7_exploration_value", exploration_value},
      {"c8_small_instance_oracles", small_instance_oracles},
      {"c9_performance_envelope", performance_envelope},
  };
  return table;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2 || !criteria().contains(argv[1])) {
    std::fprintf(stderr, "usage: %s <criterion>\n", argv[0]);
    for (const auto& [name, _] : criteria()) std::fprintf(stderr, "  %s\n", name.c_str());
    return 2;
  }
  try {
    const auto v = criteria().at(argv[1])();
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", argv[1], v.summary.c_str());
    return v.pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::printf("FAIL %s: %s\n", argv[1], e.what());
    return 1;
  }
}
