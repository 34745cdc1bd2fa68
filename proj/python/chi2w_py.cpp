#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chi2w/bounds.hpp"
#include "chi2w/density.hpp"
#include "chi2w/error.hpp"
#include "chi2w/io.hpp"
#include "chi2w/oracle.hpp"
#include "chi2w/spectrum.hpp"

namespace py = pybind11;
using namespace chi2w;

namespace {

Spectrum make_spectrum(std::vector<double> lambdas, std::optional<std::vector<double>> shifts,
                       double offset) {
  return validate_spectrum(std::move(lambdas), std::move(shifts), offset);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Density maximum and bounds for weighted sums of chi-square variables";

  py::register_exception<Error>(m, "Chi2wError", PyExc_ValueError);

  py::class_<Spectrum>(m, "Spectrum")
      .def(py::init(&make_spectrum), py::arg("lambdas"), py::arg("shifts") = py::none(),
           py::arg("offset") = 0.0)
      .def_property_readonly("lambdas", &Spectrum::lambdas)
      .def_property_readonly("shifts", &Spectrum::shifts)
      .def_property_readonly("offset", &Spectrum::offset)
      .def("__len__", &Spectrum::size)
      .def("__repr__", [](const Spectrum& s) {
        return "Spectrum(n=" + std::to_string(s.size()) + ", offset=" + io::format_real(s.offset()) + ")";
      });

  py::class_<DerivedStats>(m, "DerivedStats")
      .def_readonly("a1", &DerivedStats::a1)
      .def_readonly("a2", &DerivedStats::a2)
      .def_readonly("b1", &DerivedStats::b1)
      .def_readonly("mean", &DerivedStats::mean)
      .def_readonly("variance", &DerivedStats::variance);

  py::class_<EvalConfig>(m, "EvalConfig")
      .def(py::init<>())
      .def_readwrite("eps_quad", &EvalConfig::eps_quad)
      .def_readwrite("eps_tail", &EvalConfig::eps_tail)
      .def_readwrite("grid_points", &EvalConfig::grid_points)
      .def_readwrite("bracket_sigmas", &EvalConfig::bracket_sigmas)
      .def_readwrite("refine_tol", &EvalConfig::refine_tol);

  py::class_<DensityMax>(m, "DensityMax")
      .def_property_readonly("finite", &DensityMax::finite)
      .def_readonly("argmax", &DensityMax::argmax)
      .def_readonly("value", &DensityMax::value)
      .def_readonly("certified_error", &DensityMax::certified_error);

  m.def("derived_stats", &derived_stats, py::arg("spectrum"));
  m.def("pdf", &pdf_point, py::arg("spectrum"), py::arg("x"), py::arg("config") = EvalConfig{});
  m.def("cdf", &cdf_point, py::arg("spectrum"), py::arg("x"), py::arg("config") = EvalConfig{});
  m.def("cf", &cf_value, py::arg("spectrum"), py::arg("t"));
  m.def("density_max", &density_max, py::arg("spectrum"), py::arg("config") = EvalConfig{});
  m.def("sample", &sample, py::arg("spectrum"), py::arg("n"), py::arg("seed") = 0);
  m.def(
      "bound_report",
      [](const Spectrum& s, const EvalConfig& cfg) { return io::to_json(build_report(s, cfg)).dump(); },
      py::arg("spectrum"), py::arg("config") = EvalConfig{},
      "Report as a JSON string (schema chi2w-report/1)");
}
