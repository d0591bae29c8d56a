#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "topoplasma/bulk.hpp"
#include "topoplasma/dirac.hpp"
#include "topoplasma/errors.hpp"
#include "topoplasma/invariants.hpp"
#include "topoplasma/orchestrator.hpp"

namespace py = pybind11;
using namespace topoplasma;

PYBIND11_MODULE(_topoplasma, m) {
  m.doc() = "Topological invariants and interface spectra of magnetized cold plasma";
  m.attr("__version__") = kVersion;

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<InvalidParameter>(m, "InvalidParameter", base.ptr());
  py::register_exception<NotApplicable>(m, "NotApplicable", base.ptr());
  py::register_exception<NumericalFailure>(m, "NumericalFailure", base.ptr());
  py::register_exception<ResolutionError>(m, "ResolutionError", base.ptr());

  py::class_<Regularization>(m, "Regularization")
      .def(py::init(&parse_regularization), py::arg("spec") = "none")
      .def_readonly("eta", &Regularization::eta)
      .def("__str__", [](const Regularization& r) { return to_string(r); });

  py::class_<PlasmaParams>(m, "PlasmaParams")
      .def(py::init([](double oc, double op, double kz, const std::string& reg) {
             PlasmaParams p{oc, op, kz, parse_regularization(reg)};
             p.validate();
             return p;
           }),
           py::arg("omega_c"), py::arg("omega_p"), py::arg("k_z"), py::arg("reg") = "none")
      .def_readwrite("omega_c", &PlasmaParams::omega_c)
      .def_readwrite("omega_p", &PlasmaParams::omega_p)
      .def_readwrite("k_z", &PlasmaParams::k_z)
      .def_property_readonly("sigma_bar", &PlasmaParams::sigma_bar)
      .def_property_readonly("reg", [](const PlasmaParams& p) { return to_string(p.reg); })
      .def("__repr__", [](const PlasmaParams& p) {
        return "PlasmaParams(" + std::to_string(p.omega_c) + ", " + std::to_string(p.omega_p) + ", " +
               std::to_string(p.k_z) + ", '" + to_string(p.reg) + "')";
      });

  m.def("hamiltonian", [](const PlasmaParams& p, double kx, double ky) -> Eigen::MatrixXcd {
    return build_bulk_hamiltonian_xy(p, kx, ky);
  });
  m.def("bands", [](const PlasmaParams& p, double k, double theta) -> Eigen::VectorXd {
    return band_structure(p, {k, theta}).eigenvalues;
  }, py::arg("p"), py::arg("k"), py::arg("theta") = 0.0);
  m.def("transition_frequencies", &transition_frequencies);
  m.def("classify_phase", [](const PlasmaParams& p) { return to_string(classify_phase(p)); });
  m.def("curvature", [](const PlasmaParams& p, int band, std::optional<double> sigma_bar) {
    return curvature_analytic(p, band, sigma_bar).value;
  }, py::arg("p"), py::arg("band"), py::arg("sigma_bar") = py::none());
  m.def("curvature_quadrature", [](const PlasmaParams& p, std::vector<int> bands, int n) {
    QuadratureOptions o;
    o.n_r = n;
    o.n_theta = n;
    auto r = curvature_quadrature(p, bands, o);
    return py::make_tuple(r.value, r.residual);
  }, py::arg("p"), py::arg("bands"), py::arg("n") = 64);
  m.def("bdi", [](const PlasmaParams& north, const PlasmaParams& south, int ell) {
    BdiResult b = bdi(north, south, ell);
    return py::dict(py::arg("value") = b.value, py::arg("raw") = b.raw, py::arg("is_bdi") = b.is_bdi);
  });
  m.def("table2", [](const std::string& reg) {
    py::list out;
    for (const auto& r : table2(parse_regularization(reg)))
      out.append(py::make_tuple(r.transition, r.ell1.value, r.ell2.value, r.ell1.is_bdi && r.ell2.is_bdi));
    return out;
  }, py::arg("reg") = "omega-decay:0.01");
  m.def("reduce", [](const PlasmaParams& p, bool plus) {
    DiracModel d = plus ? reduce_plus(p) : reduce_minus(p);
    return py::dict(py::arg("alpha") = d.alpha, py::arg("beta") = d.beta, py::arg("omega_star") = d.omega_star,
                    py::arg("omega_tilde") = d.omega_tilde, py::arg("identity") = d.identity_coeff(),
                    py::arg("sigma3") = d.sigma3_coeff(), py::arg("gap_overlap") = gap_overlap(d));
  }, py::arg("p"), py::arg("plus") = false);
  m.def("weyl_residual", [](double nscale, double E, double xi) { return weyl_residual({nscale, E, xi}); },
        py::arg("nscale"), py::arg("E") = 0.0, py::arg("xi") = 0.0);
  m.def("run", [](const std::string& command, const std::map<std::string, std::string>& settings,
                  const std::string& out_dir, int threads, bool write) {
    Config over;
    for (const auto& [k, v] : settings) over.set(k, v);
    Config cfg = effective_config(command, Config{}, over);
    RunOptions opt;
    opt.out_dir = out_dir;
    opt.threads = threads;
    opt.write = write;
    return run_command(command, cfg, opt).summary.dump();
  }, py::arg("command"), py::arg("settings") = std::map<std::string, std::string>{}, py::arg("out_dir") = "out",
        py::arg("threads") = 1, py::arg("write") = false);
}
