// Python bindings: config-driven entry points returning plain dicts.

#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spectral_tail/bounds.hpp"
#include "spectral_tail/cells.hpp"
#include "spectral_tail/cli/commands.hpp"
#include "spectral_tail/cli/config.hpp"
#include "spectral_tail/errors.hpp"
#include "spectral_tail/oracle.hpp"
#include "spectral_tail/partition.hpp"
#include "spectral_tail/semiclassical.hpp"

namespace py = pybind11;
using namespace spectral_tail;

namespace {

py::dict bracket(const cli::RunConfig& c, double eps) {
  const auto b = assemble_bracket(c.family(), c.stiffness(), eps, c.run.a);
  py::dict d;
  d["eps"] = b.eps;
  d["M"] = b.cells;
  d["delta"] = b.delta;
  d["l_eps"] = b.l_eps;
  d["n_lower"] = b.n_lower;
  d["n_upper"] = b.n_upper;
  d["s_lower"] = b.s_lower;
  d["s_upper"] = b.s_upper;
  return d;
}

py::dict weyl(const cli::RunConfig& c, double eps) {
  const auto w = weyl_tail_sum(c.family(), c.stiffness(), eps);
  py::list branches;
  for (const auto& br : w.per_branch) {
    py::dict e;
    e["j"] = br.j;
    e["psi"] = br.psi;
    e["contribution"] = br.contribution;
    branches.append(e);
  }
  py::dict d;
  d["eps"] = w.eps;
  d["total"] = w.total;
  d["error_estimate"] = w.error_estimate;
  d["per_branch"] = branches;
  return d;
}

py::dict oracle(const cli::RunConfig& c, double eps, unsigned threads) {
  OracleOptions o;
  o.h = c.oracle.h;
  o.pad = c.oracle.pad;
  o.richardson = c.oracle.richardson;
  o.threads = threads;
  OracleResult r;
  {
    py::gil_scoped_release release;
    r = negative_tail(c.family(), c.stiffness(), eps, o);
  }
  py::list branches;
  for (const auto& br : r.per_branch) {
    py::dict e;
    e["j"] = br.j;
    e["psi"] = br.psi;
    e["h"] = br.h;
    e["eigenvalues"] = br.eigenvalues;
    branches.append(e);
  }
  py::dict d;
  d["eps"] = r.eps;
  d["count"] = r.count;
  d["sum"] = r.sum;
  d["err"] = r.error();
  d["per_branch"] = branches;
  return d;
}

py::tuple run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code;
  {
    py::gil_scoped_release release;
    code = cli::run(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Negative spectral tail bounds for Schrodinger-type operators";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<AdmissibilityError>(m, "AdmissibilityError",
                                             PyExc_ArithmeticError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<UnsupportedDecoupling>(m, "UnsupportedDecoupling",
                                                PyExc_NotImplementedError);

  py::class_<cli::RunConfig>(m, "Config")
      .def_static(
          "from_yaml",
          [](const std::string& text) { return cli::parse_config(text); },
          py::arg("text"))
      .def_static("load", &cli::load_config, py::arg("path"))
      .def("to_yaml", &cli::serialize_config)
      .def("__eq__", [](const cli::RunConfig& a, const cli::RunConfig& b) { return a == b; })
      .def_property_readonly("m", [](const cli::RunConfig& c) { return c.potential.m; })
      .def_property_readonly("a", [](const cli::RunConfig& c) { return c.run.a; })
      .def_property_readonly("eps", [](const cli::RunConfig& c) { return c.run.eps; });

  m.def("bracket", &bracket, py::arg("config"), py::arg("eps"));
  m.def("weyl", &weyl, py::arg("config"), py::arg("eps"));
  m.def("oracle", &oracle, py::arg("config"), py::arg("eps"), py::arg("threads") = 1);
  m.def("psi", [](const cli::RunConfig& c, std::size_t j, double eps) {
    return c.family().psi(j, eps);
  });

  m.def("a_eval", &a_eval, py::arg("alpha"), py::arg("p"), py::arg("delta"), py::arg("t"));
  m.def("b_value", &b_value, py::arg("alpha"), py::arg("eps"), py::arg("p"), py::arg("delta"));
  m.def("beta_value", &beta_value, py::arg("alpha"), py::arg("eps"), py::arg("p"),
        py::arg("delta"));

  m.def(
      "partition",
      [](double psi1, double a) {
        const auto part = make_partition(psi1, a);
        py::dict d;
        d["M"] = part.cells;
        d["delta"] = part.delta;
        d["points"] = part.points;
        return d;
      },
      py::arg("psi1"), py::arg("a"));
  m.def(
      "refined_widths",
      [](double psi1, double a, std::size_t K) {
        return refine_delta_sequence(make_partition(psi1, a), K).deltas;
      },
      py::arg("psi1"), py::arg("a"), py::arg("K"));
  m.def(
      "error_exponents",
      [](double a0, double mm) {
        const auto e = error_exponents(a0, mm);
        py::dict d;
        d["a"] = e.a_param;
        d["t0"] = e.t0;
        d["m_sup"] = e.admissible_m_sup;
        return d;
      },
      py::arg("a0"), py::arg("m"));

  m.def("run", &run, py::arg("args"),
        "Run the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
