// Python surface: the closed-form energy model, scenario runs and the
// validation suites. Runs release the GIL.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "wecdcee/harness.hpp"

namespace py = pybind11;
using namespace wec;

namespace {

py::dict metrics_dict(const RunMetrics& m) {
  py::dict d;
  d["controller"] = m.controller;
  d["duration"] = m.duration;
  d["high_level_steps"] = m.high_level_steps;
  d["mean_power"] = m.mean_power;
  d["trailing_mean_power"] = m.trailing_mean_power;
  d["energy"] = m.energy;
  d["convergence_step"] = m.convergence_step;
  d["heave_violations"] = m.heave_violations;
  d["velocity_violations"] = m.velocity_violations;
  d["filter_underflows"] = m.filter_underflows;
  d["wall_seconds"] = m.wall_seconds;
  return d;
}

py::dict segment_dict(const SegmentMetrics& s) {
  py::dict d;
  d["start"] = s.start;
  d["end"] = s.end;
  d["wave"] = s.wave;
  d["feasible_optimum"] = s.feasible_optimum;
  d["trailing_mean_power"] = s.trailing_mean_power;
  d["convergence_step"] = s.convergence_step;
  return d;
}

// Column-wise view of the controller trace.
py::dict trace_dict(const std::vector<ControllerRecord>& records) {
  std::vector<double> time, amplitude, phase, omega, omega_hat, omega_std, true_omega, measured;
  std::vector<std::size_t> selected;
  for (const auto& r : records) {
    time.push_back(r.time);
    amplitude.push_back(r.command.amplitude);
    phase.push_back(r.command.phase);
    omega.push_back(r.command.omega);
    omega_hat.push_back(r.nominal.omega);
    omega_std.push_back(r.spread.omega);
    true_omega.push_back(r.true_wave.omega);
    measured.push_back(r.measured.t);
    selected.push_back(r.selected);
  }
  py::dict d;
  d["time"] = time;
  d["amplitude_u"] = amplitude;
  d["phase_u"] = phase;
  d["omega_u"] = omega;
  d["omega_hat"] = omega_hat;
  d["omega_std"] = omega_std;
  d["true_omega"] = true_omega;
  d["power_t"] = measured;
  d["selected"] = selected;
  return d;
}

py::dict result_dict(const RunResult& r) {
  py::dict d;
  d["metrics"] = metrics_dict(r.metrics);
  py::list segments;
  for (const auto& s : r.segments) segments.append(segment_dict(s));
  d["segments"] = segments;
  d["trace"] = trace_dict(r.records);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Wave energy converter simulator with a dual-control PTO controller";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<WaveParams>(m, "WaveParams")
      .def(py::init<double, double, double>(), py::arg("amplitude"), py::arg("phase"),
           py::arg("omega"))
      .def_readwrite("amplitude", &WaveParams::amplitude)
      .def_readwrite("phase", &WaveParams::phase)
      .def_readwrite("omega", &WaveParams::omega)
      .def("__eq__", [](const WaveParams& a, const WaveParams& b) { return a == b; })
      .def("__repr__", [](const WaveParams& w) {
        std::ostringstream os;
        os << "WaveParams(" << w.amplitude << ", " << w.phase << ", " << w.omega << ")";
        return os.str();
      });

  py::class_<PtoProfile>(m, "PtoProfile")
      .def(py::init<double, double, double>(), py::arg("amplitude"), py::arg("phase"),
           py::arg("omega"))
      .def_readwrite("amplitude", &PtoProfile::amplitude)
      .def_readwrite("phase", &PtoProfile::phase)
      .def_readwrite("omega", &PtoProfile::omega)
      .def("__eq__", [](const PtoProfile& a, const PtoProfile& b) { return a == b; })
      .def("__repr__", [](const PtoProfile& u) {
        std::ostringstream os;
        os << "PtoProfile(" << u.amplitude << ", " << u.phase << ", " << u.omega << ")";
        return os.str();
      });

  py::class_<WecParams>(m, "WecParams")
      .def(py::init<>())
      .def_readwrite("mass", &WecParams::mass)
      .def_readwrite("radiation_damping", &WecParams::radiation_damping)
      .def_readwrite("stiffness", &WecParams::stiffness)
      .def_readwrite("excitation", &WecParams::excitation)
      .def_readwrite("force_limit", &WecParams::force_limit)
      .def_readwrite("heave_limit", &WecParams::heave_limit)
      .def_readwrite("velocity_limit", &WecParams::velocity_limit);

  const WecParams plant;
  m.def("average_power",
        py::overload_cast<const PtoProfile&, const WaveParams&, const WecParams&, double>(
            &average_power),
        py::arg("profile"), py::arg("wave"), py::arg("plant") = plant, py::arg("window") = 50.0,
        "Mean power over [0, window] for a harmonic PTO force in a harmonic wave, W.");
  m.def("steady_average_power", &steady_average_power, py::arg("profile"), py::arg("wave"),
        py::arg("plant") = plant);
  m.def("optimal_profile", &optimal_profile, py::arg("wave"), py::arg("plant") = plant);
  m.def("optimal_average_power", &optimal_average_power, py::arg("wave"),
        py::arg("plant") = plant);
  m.def("feasible_optimal_power", &feasible_optimal_power, py::arg("wave"),
        py::arg("plant") = plant);
  m.def("simulated_average_power", &simulated_average_power, py::arg("profile"),
        py::arg("wave"), py::arg("plant") = plant, py::arg("duration") = 50.0,
        py::arg("dt") = 0.01, py::arg("preroll_periods") = 10.0);

  m.def(
      "run_scenario",
      [](const std::filesystem::path& config, std::optional<std::uint64_t> seed,
         std::optional<double> duration, std::optional<std::filesystem::path> out) {
        auto cfg = load_scenario(config);
        if (seed) cfg.seed = *seed;
        if (duration) cfg.duration = *duration;
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_scenario(cfg, RunOutputs{out});
        }
        return result_dict(r);
      },
      py::arg("config"), py::arg("seed") = py::none(), py::arg("duration") = py::none(),
      py::arg("out") = py::none(),
      "Runs a scenario file; returns metrics, per-segment metrics and the controller trace.");

  m.def(
      "validate",
      [](const std::string& suite, std::size_t cases, std::uint64_t seed) {
        SuiteReport rep;
        if (suite == "oracle-equivalence") {
          rep = validate_oracle_equivalence(cases ? cases : 100, seed);
        } else if (suite == "analytic-optimum") {
          rep = validate_analytic_optimum(cases ? cases : 20, seed);
        } else {
          throw ConfigError("unknown suite '" + suite + "'");
        }
        py::dict d;
        d["name"] = rep.name;
        d["cases"] = rep.cases;
        d["failures"] = rep.failures;
        d["worst"] = rep.worst;
        d["messages"] = rep.messages;
        d["passed"] = rep.passed();
        return d;
      },
      py::arg("suite"), py::arg("cases") = 0, py::arg("seed") = 1);
}
