#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qmw/runner.hpp"

namespace py = pybind11;
using namespace qmw;

namespace {

py::dict check_to_dict(const CheckResult& r) {
  py::dict d;
  d["name"] = r.name;
  d["kind"] = to_string(r.kind);
  d["pass"] = r.pass;
  d["residuals"] = r.residuals;
  d["levels"] = r.levels;
  d["spacings"] = r.spacings;
  d["fitted_order"] = r.fitted_order;
  d["threshold"] = r.threshold;
  py::dict series;
  for (const auto& s : r.series) series[py::str(s.name)] = s.values;
  d["series"] = series;
  d["note"] = r.note;
  return d;
}

ThetaMatrix theta_from(int d, const std::vector<double>& t) { return ThetaMatrix(d, t); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Warped-convolution coordinate operators on a truncated lattice Fock space";
  m.attr("__version__") = QMW_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ThetaError>(m, "ThetaError", PyExc_ValueError);
  py::register_exception<LatticeError>(m, "LatticeError", PyExc_ValueError);
  py::register_exception<BasisError>(m, "BasisError", PyExc_MemoryError);

  py::class_<LatticeSpec>(m, "LatticeSpec")
      .def(py::init([](int n, int M, double L, double mass) { return LatticeSpec{n, M, L, mass}; }), py::arg("n") = 1,
           py::arg("M") = 8, py::arg("L") = 8.0, py::arg("m") = 0.0)
      .def_readwrite("n", &LatticeSpec::n)
      .def_readwrite("M", &LatticeSpec::M)
      .def_readwrite("L", &LatticeSpec::L)
      .def_readwrite("m", &LatticeSpec::m)
      .def_property_readonly("dp", &LatticeSpec::dp)
      .def_property_readonly("dx", &LatticeSpec::dx);

  py::class_<FockSpace>(m, "FockSpace")
      .def(py::init([](const LatticeSpec& spec, int n_max) { return make_fock_space(spec, n_max); }),
           py::arg("spec"), py::arg("n_max") = 2)
      .def_property_readonly("dim", [](const FockSpace& s) { return s.basis.size(); })
      .def_property_readonly("num_modes", [](const FockSpace& s) { return s.grid.num_modes(); })
      .def_property_readonly("momenta", [](const FockSpace& s) { return s.grid.points; })
      .def_property_readonly("energies", [](const FockSpace& s) { return s.grid.energies; })
      .def_property_readonly("positions", [](const FockSpace& s) { return s.grid.dual_points; })
      .def_property_readonly("sector_momenta", [](const FockSpace& s) { return s.sectors.q; })
      .def_property_readonly("particle_numbers", [](const FockSpace& s) { return s.sectors.npart; })
      .def("states", [](const FockSpace& s) { return s.basis.states(); });

  m.def("basis_size", &basis_size, py::arg("num_modes"), py::arg("n_max"));

  m.def(
      "operator",
      [](const FockSpace& s, const std::string& name) { return named_operator(s, name).matrix; },
      py::arg("space"), py::arg("name"),
      "Sparse matrix of a named operator: N, P<mu>, V<j>, X<j>, Xs<j>, X0, Vt<mu>, U<j>, NWP<j>, Vt<k>_<j>.");

  m.def(
      "warp",
      [](const FockSpace& s, const SparseMatrix& a, const std::vector<double>& theta) {
        return warp(make_operator(a, s.sectors, "A"), theta_from(s.sectors.dim(), theta), s.sectors).matrix;
      },
      py::arg("space"), py::arg("a"), py::arg("theta"));

  m.def(
      "rieffel_product",
      [](const FockSpace& s, const SparseMatrix& a, const SparseMatrix& b, const std::vector<double>& theta) {
        return rieffel_product(make_operator(a, s.sectors, "A"), make_operator(b, s.sectors, "B"),
                               theta_from(s.sectors.dim(), theta), s.sectors)
            .matrix;
      },
      py::arg("space"), py::arg("a"), py::arg("b"), py::arg("theta"));

  m.def(
      "deformed_commutator",
      [](const FockSpace& s, const SparseMatrix& a, const SparseMatrix& b, const std::vector<double>& theta) {
        return deformed_commutator(make_operator(a, s.sectors, "A"), make_operator(b, s.sectors, "B"),
                                   theta_from(s.sectors.dim(), theta), s.sectors)
            .matrix;
      },
      py::arg("space"), py::arg("a"), py::arg("b"), py::arg("theta"));

  m.def(
      "translate",
      [](const FockSpace& s, const SparseMatrix& a, const std::vector<double>& b) {
        return translate(make_operator(a, s.sectors, "A"), s.sectors, b).matrix;
      },
      py::arg("space"), py::arg("a"), py::arg("b"));

  m.def("fit_order", &fit_order, py::arg("residuals"), py::arg("spacings"));

  m.def(
      "parse_config", [](const std::string& text) { return canonical_config(parse_config(text)); }, py::arg("text"),
      "Validates a JSON config and returns its canonical form.");
  m.def(
      "config_hash", [](const std::string& text) { return config_hash(parse_config(text)); }, py::arg("text"));

  m.def(
      "run_suites",
      [](const std::string& config_text, const std::vector<std::string>& suites, const std::string& command) {
        const RunConfig c = parse_config(config_text);
        std::vector<CheckResult> results;
        {
          py::gil_scoped_release release;
          results = run_suites(c, resolve_suites(suites, command));
        }
        py::list out;
        for (const auto& r : results) out.append(check_to_dict(r));
        return out;
      },
      py::arg("config") = "{}", py::arg("suites") = std::vector<std::string>{"all"},
      py::arg("command") = "verify");
}
