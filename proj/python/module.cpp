#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "kbsyk/kbsyk.hpp"
#include "kbsyk/runner.hpp"

namespace py = pybind11;
using namespace kbsyk;

namespace {

py::dict trace_dict(const BetaTrace& t) {
  py::dict d;
  d["t"] = t.t;
  d["beta_fdt"] = t.beta_fdt;
  d["beta_corner"] = t.beta_corner;
  d["energy"] = t.energy;
  d["fit_quality"] = t.fit_quality;
  std::vector<bool> reliable(t.reliable.begin(), t.reliable.end());
  d["reliable"] = reliable;
  return d;
}

BetaTrace trace_from(const py::dict& d) {
  BetaTrace t;
  t.t = d["t"].cast<std::vector<double>>();
  t.beta_fdt = d["beta_fdt"].cast<std::vector<double>>();
  const std::size_t n = t.t.size();
  auto column = [&](const char* key, double fill) {
    return d.contains(key) ? d[key].cast<std::vector<double>>() : std::vector<double>(n, fill);
  };
  t.beta_corner = column("beta_corner", std::nan(""));
  t.energy = column("energy", std::nan(""));
  t.fit_quality = column("fit_quality", 0.0);
  if (d.contains("reliable")) {
    for (bool r : d["reliable"].cast<std::vector<bool>>()) t.reliable.push_back(r ? 1 : 0);
  } else {
    t.reliable.assign(n, 1);
  }
  if (t.beta_fdt.size() != n || t.beta_corner.size() != n || t.energy.size() != n || t.fit_quality.size() != n ||
      t.reliable.size() != n)
    throw DomainError("trace columns differ in length");
  return t;
}

}  // namespace

PYBIND11_MODULE(_kbsyk, m) {
  m.doc() = "Two-time Kadanoff-Baym solver for quenched SYK systems";
  m.attr("__version__") = KBSYK_VERSION;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto domain = py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<InsufficientWindowError>(m, "InsufficientWindowError", domain.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<NonConvergenceError>(m, "NonConvergenceError", base.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());
  py::register_exception<ConventionViolation>(m, "ConventionViolation", base.ptr());
  py::register_exception<UndefinedTemperatureError>(m, "UndefinedTemperatureError", base.ptr());
  py::register_exception<BracketError>(m, "BracketError", base.ptr());

  py::class_<TimeLattice>(m, "TimeLattice")
      .def(py::init(&TimeLattice::make), py::arg("lambda_t") = 25.0, py::arg("delta_t") = 0.1)
      .def_readonly("delta_t", &TimeLattice::delta_t)
      .def_readonly("lambda_t", &TimeLattice::lambda_t)
      .def_readonly("n_points", &TimeLattice::n_points)
      .def_property_readonly("zero_index", &TimeLattice::zero_index)
      .def("time", &TimeLattice::time)
      .def("index_of", &TimeLattice::index_of)
      .def("__repr__", [](const TimeLattice& l) {
        std::ostringstream os;
        os << "TimeLattice(lambda_t=" << l.lambda_t << ", delta_t=" << l.delta_t << ", n_points=" << l.n_points << ")";
        return os.str();
      });

  py::class_<EquilibriumParams>(m, "EquilibriumParams")
      .def(py::init(&EquilibriumParams::defaults), py::arg("beta"), py::arg("coupling_j") = 0.5, py::arg("q_body") = 4)
      .def_static("for_lattice", &EquilibriumParams::for_lattice, py::arg("beta"), py::arg("coupling_j"),
                  py::arg("lattice"), py::arg("q_body") = 4)
      .def_readwrite("beta", &EquilibriumParams::beta)
      .def_readwrite("coupling_j", &EquilibriumParams::coupling_j)
      .def_readwrite("q_body", &EquilibriumParams::q_body)
      .def_readwrite("omega_max", &EquilibriumParams::omega_max)
      .def_readwrite("n_omega", &EquilibriumParams::n_omega)
      .def_readwrite("mixing", &EquilibriumParams::mixing)
      .def_readwrite("tol", &EquilibriumParams::tol)
      .def_readwrite("max_iters", &EquilibriumParams::max_iters);

  py::class_<EquilibriumState>(m, "EquilibriumState")
      .def_readonly("params", &EquilibriumState::params)
      .def_readonly("omega", &EquilibriumState::omega)
      .def_readonly("retarded", &EquilibriumState::retarded)
      .def_readonly("spectral", &EquilibriumState::spectral)
      .def_readonly("time", &EquilibriumState::time)
      .def_readonly("greater_time", &EquilibriumState::greater_time)
      .def_readonly("iterations", &EquilibriumState::iterations)
      .def_readonly("residual_history", &EquilibriumState::residual_history)
      .def("sum_rule", &EquilibriumState::sum_rule)
      .def("kms_residual", &EquilibriumState::kms_residual);

  m.def("solve_equilibrium", &solve_equilibrium, py::arg("params"), py::call_guard<py::gil_scoped_release>());
  m.def("conformal_retarded", &conformal_retarded, py::arg("beta"), py::arg("coupling_j"), py::arg("q_body"),
        py::arg("t"));

  py::class_<ContourGreen>(m, "ContourGreen")
      .def(py::init<const TimeLattice&, CMatrix>(), py::arg("lattice"), py::arg("greater"))
      .def_property_readonly("lattice", &ContourGreen::lattice)
      .def_property_readonly("greater", [](const ContourGreen& g) { return CMatrix(g.data()); })
      .def("antisymmetry_residual", &antisymmetry_residual)
      .def("diagonal_residual", &diagonal_residual);

  m.def("lay_initial_condition", &lay_initial_condition, py::arg("state"), py::arg("lattice"));
  m.def("read_snapshot", &read_snapshot, py::arg("path"));
  m.def("write_snapshot", py::overload_cast<const ContourGreen&, const std::string&>(&write_snapshot),
        py::arg("green"), py::arg("path"));

  py::class_<BetaEstimate>(m, "BetaEstimate")
      .def_readonly("beta", &BetaEstimate::beta)
      .def_readonly("fit_quality", &BetaEstimate::fit_quality)
      .def_readonly("used_tanh_fit", &BetaEstimate::used_tanh_fit)
      .def_readonly("tail_ratio", &BetaEstimate::tail_ratio);

  m.def("effective_beta_fdt", [](const ContourGreen& g, double t) { return effective_beta_fdt(g, t); },
        py::arg("green"), py::arg("t"));
  m.def("effective_beta_corner", [](const ContourGreen& g, double t) { return effective_beta_corner(g, t); },
        py::arg("green"), py::arg("t"));
  m.def("total_energy", &total_energy, py::arg("green"), py::arg("coupling_j"), py::arg("t"));
  m.def(
      "beta_trace",
      [](const ContourGreen& g, double j, int stride) {
        TraceOptions o;
        o.stride = stride;
        return trace_dict(beta_trace(g, j, o));
      },
      py::arg("green"), py::arg("coupling_j") = 0.5, py::arg("stride") = 5);

  m.def(
      "evolve_quench",
      [](const EquilibriumParams& system, const TimeLattice& lat, const std::vector<py::dict>& baths,
         const std::string& method, double tol) {
        QuenchConfig c;
        c.system = system;
        c.lattice = lat;
        c.propagation.method = parse_method(method);
        c.propagation.tol = tol;
        for (const auto& b : baths)
          c.baths.push_back(BathSpec::make(b["beta"].cast<double>(), b["v"].cast<double>(),
                                           b.contains("n") ? b["n"].cast<int>() : 3, lat, system.coupling_j));
        py::gil_scoped_release release;
        return evolve_quench(c).green;
      },
      py::arg("system"), py::arg("lattice"), py::arg("baths") = std::vector<py::dict>{},
      py::arg("method") = "whole-grid", py::arg("tol") = 1e-9,
      "Quench from the thermal state of `system`; each bath is a dict with beta, v and optional n.");

  m.def(
      "evolve_lindblad",
      [](const EquilibriumParams& system, const TimeLattice& lat, double mu, const std::string& method) {
        LindbladConfig c;
        c.system = system;
        c.lattice = lat;
        c.mu = mu;
        c.propagation.method = parse_method(method);
        py::gil_scoped_release release;
        return unmap_to_isolated(evolve_lindblad(c).green.greater(), lat);
      },
      py::arg("system"), py::arg("lattice"), py::arg("mu"), py::arg("method") = "whole-grid",
      "Dissipative evolution, returned as the isolated-convention greater function.");

  m.def(
      "detect_crossings",
      [](const py::dict& a, const py::dict& b, double t_min, double deadband) {
        CrossingOptions o;
        o.t_min = t_min;
        o.deadband = deadband;
        return detect_crossings(trace_from(a), trace_from(b), o).to_json();
      },
      py::arg("a"), py::arg("b"), py::arg("t_min") = 0.0, py::arg("deadband") = -1.0,
      "Returns the crossing report as a JSON string.");

  m.def(
      "run_json",
      [](const std::string& config) {
        const RunConfig c = RunConfig::parse(config);
        std::ostringstream log;
        const auto r = [&] {
          py::gil_scoped_release release;
          return run(c, log);
        }();
        return r.summary.dump();
      },
      py::arg("config"), "Runs a flat JSON config and returns the summary as JSON.");
}
