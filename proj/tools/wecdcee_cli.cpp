// Command-line front end: run one scenario, compare controllers, or run a
// validation suite.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

#include "wecdcee/harness.hpp"

namespace {

void print_metrics(const wec::RunResult& r) {
  const auto& m = r.metrics;
  std::printf("%-9s steps=%zu mean=%.3f W trailing=%.3f W energy=%.6g J converged_at=%ld "
              "violations(heave=%zu, velocity=%zu) wall=%.1f s\n",
              m.controller.c_str(), m.high_level_steps, m.mean_power, m.trailing_mean_power,
              m.energy, m.convergence_step, m.heave_violations, m.velocity_violations,
              m.wall_seconds);
  for (std::size_t i = 0; i < r.segments.size(); ++i) {
    const auto& s = r.segments[i];
    std::printf("  segment %zu [%g, %g) s: trailing %.3f W of feasible %.3f W, converged_at=%ld\n",
                i + 1, s.start, s.end, s.trailing_mean_power, s.feasible_optimum,
                s.convergence_step);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wave energy converter closed-loop simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("--config", config_path, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--duration", duration, "Override the duration, s");
  run->add_option("--out", out_dir, "Directory for CSV outputs");

  std::vector<std::string> compare_paths;
  auto* compare = app.add_subcommand("compare", "Run scenarios that differ only in controller");
  compare->add_option("--configs", compare_paths, "Scenario files")->required()->check(CLI::ExistingFile);
  compare->add_option("--seed", seed, "Override every scenario's seed");
  compare->add_option("--duration", duration, "Override every scenario's duration, s");
  compare->add_option("--out", out_dir, "Directory for CSV outputs");

  std::string suite;
  std::size_t cases = 0;
  std::uint64_t suite_seed = 1;
  auto* validate = app.add_subcommand("validate", "Run a built-in validation suite");
  validate->add_option("--suite", suite, "Suite name")
      ->required()
      ->check(CLI::IsMember({"oracle-equivalence", "analytic-optimum"}));
  validate->add_option("--cases", cases, "Number of random cases (suite default if 0)");
  validate->add_option("--seed", suite_seed, "Suite seed");

  CLI11_PARSE(app, argc, argv);

  auto load = [&](const std::string& path) {
    auto cfg = wec::load_scenario(path);
    if (seed) cfg.seed = *seed;
    if (duration) cfg.duration = *duration;
    cfg.validate();
    return cfg;
  };
  wec::RunOutputs outputs;
  if (!out_dir.empty()) outputs.directory = out_dir;

  try {
    if (*run) {
      print_metrics(wec::run_scenario(load(config_path), outputs));
    } else if (*compare) {
      std::vector<wec::ScenarioConfig> configs;
      for (const auto& p : compare_paths) configs.push_back(load(p));
      const auto results = wec::compare_controllers(configs, outputs);
      for (const auto& r : results) print_metrics(r);
      if (outputs.directory) std::printf("wrote %s\n", (*outputs.directory / "comparison.csv").c_str());
    } else {
      const auto report = suite == "oracle-equivalence"
                              ? wec::validate_oracle_equivalence(cases ? cases : 100, suite_seed)
                              : wec::validate_analytic_optimum(cases ? cases : 20, suite_seed);
      for (const auto& msg : report.messages) std::printf("  %s\n", msg.c_str());
      std::printf("%s: %zu/%zu cases passed, worst %.3g\n", report.name.c_str(),
                  report.cases - report.failures, report.cases, report.worst);
      return report.passed() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
