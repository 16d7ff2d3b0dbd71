#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>
#include <string>

#include "cholqr/cost_model.hpp"
#include "cholqr/driver.hpp"
#include "cholqr/errors.hpp"
#include "cholqr/testbed.hpp"
#include "cholqr/tsm_io.hpp"

namespace py = pybind11;
using namespace cholqr;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
  Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  if (m.size() != 0) std::memcpy(m.data(), a.data(), m.size() * sizeof(double));
  return m;
}

Array to_array(ConstMatrixView m) {
  Array out({m.rows(), m.cols()});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) w(i, j) = m(i, j);
  }
  return out;
}

struct PyFactorResult {
  std::optional<Array> q;
  std::optional<Array> r;
  std::optional<BreakdownInfo> breakdown;
  std::size_t allreduce_calls = 0;
  std::size_t panels = 1;
  std::size_t panel_width = 0;
  double elapsed_seconds = 0.0;
};

PyFactorResult py_factorize(const Array& a, const std::string& algo, int ranks, const std::string& backend,
                            std::size_t panels) {
  const Matrix m = to_matrix(a);
  FactorOptions o;
  o.algorithm = parse_algorithm(algo);
  o.ranks = ranks;
  o.backend = parse_backend(backend);
  o.panels = panels;
  FactorResult f;
  {
    py::gil_scoped_release release;
    f = factorize(m, o);
  }
  PyFactorResult out;
  if (f.q) out.q = to_array(*f.q);
  if (f.r) out.r = to_array(f.r->view());
  out.breakdown = f.breakdown;
  out.allreduce_calls = f.allreduce_calls;
  out.panels = f.panels;
  out.panel_width = f.panel_width;
  out.elapsed_seconds = f.elapsed_seconds;
  return out;
}

UpperTriangular to_upper(const Array& r) { return UpperTriangular::from_matrix(to_matrix(r)); }

}  // namespace

PYBIND11_MODULE(_cholqr, m) {
  m.doc() = "CholeskyQR family of tall-and-skinny QR factorizations";

  py::register_exception<CholeskyBreakdown>(m, "CholeskyBreakdownError", PyExc_ArithmeticError);
  py::register_exception<ZeroMatrix>(m, "ZeroMatrixError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<BreakdownInfo>(m, "Breakdown")
      .def_property_readonly("stage", [](const BreakdownInfo& b) { return std::string(to_string(b.stage)); })
      .def_readonly("pivot_index", &BreakdownInfo::pivot_index)
      .def_readonly("panel_index", &BreakdownInfo::panel_index)
      .def("__repr__", [](const BreakdownInfo& b) {
        return "Breakdown(stage='" + std::string(to_string(b.stage)) + "', pivot_index=" +
               std::to_string(b.pivot_index) + ")";
      });

  py::class_<PyFactorResult>(m, "FactorResult")
      .def_readonly("q", &PyFactorResult::q)
      .def_readonly("r", &PyFactorResult::r)
      .def_readonly("breakdown", &PyFactorResult::breakdown)
      .def_readonly("allreduce_calls", &PyFactorResult::allreduce_calls)
      .def_readonly("panels", &PyFactorResult::panels)
      .def_readonly("panel_width", &PyFactorResult::panel_width)
      .def_readonly("elapsed_seconds", &PyFactorResult::elapsed_seconds)
      .def_property_readonly("ok", [](const PyFactorResult& r) { return !r.breakdown.has_value(); });

  m.def("factorize", &py_factorize, py::arg("a"), py::arg("algo") = "cqr2", py::arg("ranks") = 1,
        py::arg("backend") = "serial", py::arg("panels") = 1,
        "QR of a tall matrix over `ranks` simulated ranks. Breakdowns are reported in the result.");

  m.def(
      "generate",
      [](std::size_t rows, std::size_t cols, double kappa, std::uint64_t seed) {
        const GeneratedMatrix g = generate(rows, cols, kappa, seed);
        return py::make_tuple(to_array(g.matrix), g.singular_values);
      },
      py::arg("m"), py::arg("n"), py::arg("kappa"), py::arg("seed") = 0,
      "Matrix with singular values geometric from 1 to 1/kappa. Returns (matrix, singular_values).");

  m.def(
      "orthogonality_error", [](const Array& q) { return orthogonality_error(to_matrix(q)); }, py::arg("q"));
  m.def(
      "residual_error",
      [](const Array& a, const Array& q, const Array& r) { return residual_error(to_matrix(a), to_matrix(q), to_upper(r)); },
      py::arg("a"), py::arg("q"), py::arg("r"));

  py::class_<PanelBoundReport>(m, "PanelBoundReport")
      .def_readonly("width", &PanelBoundReport::width)
      .def_readonly("matrix_condition", &PanelBoundReport::matrix_condition)
      .def_readonly("panel_condition", &PanelBoundReport::panel_condition)
      .def_readonly("lower_bound", &PanelBoundReport::lower_bound)
      .def_property_readonly("passed", &PanelBoundReport::passed);
  m.def(
      "panel_bound_check",
      [](std::size_t rows, std::size_t cols, double kappa, std::uint64_t seed, std::size_t b, double slack) {
        return panel_bound_check(generate(rows, cols, kappa, seed), b, slack);
      },
      py::arg("m"), py::arg("n"), py::arg("kappa"), py::arg("seed"), py::arg("b"), py::arg("slack") = 0.05);

  py::class_<CostEstimate>(m, "CostEstimate")
      .def_readonly("model", &CostEstimate::model)
      .def_readonly("flops", &CostEstimate::flops)
      .def_readonly("words", &CostEstimate::words)
      .def_readonly("messages", &CostEstimate::messages)
      .def_readonly("calls", &CostEstimate::calls);
  m.def("cost", &cost_by_name, py::arg("model"), py::arg("m"), py::arg("n"), py::arg("ranks"),
        py::arg("b") = std::nullopt);
  m.def(
      "predicted_allreduce_calls",
      [](const std::string& algo, std::size_t n, std::size_t panels) {
        return predicted_allreduce_calls(parse_algorithm(algo), PanelSpec::from_count(n, panels));
      },
      py::arg("algo"), py::arg("n"), py::arg("panels") = 1);

  m.def(
      "save_tsm", [](const std::string& path, const Array& a) { save_tsm(path, to_matrix(a)); }, py::arg("path"),
      py::arg("a"));
  m.def(
      "load_tsm", [](const std::string& path) { return to_array(load_tsm(path)); }, py::arg("path"));
}
