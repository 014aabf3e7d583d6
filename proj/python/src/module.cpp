#include "ddlab/pipeline.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>
#include <string>

namespace py = pybind11;
using namespace ddlab;

namespace {

SymMatrix to_sym(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw std::invalid_argument("expected a square matrix");
  const auto n = static_cast<std::size_t>(a.shape(0));
  auto v = a.unchecked<2>();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = v(i, j);
  return SymMatrix::symmetrize(m);
}

py::array_t<double> to_array(const Vec& v) { return py::array_t<double>(v.size(), v.data()); }

py::array_t<double> to_array(const Matrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) w(i, j) = m(i, j);
  return out;
}

RunConfig make_config(int nx, int ny, int m, const std::string& coarse, const std::string& scaling,
                      double rho_ratio, double tol, int maxit, std::uint64_t seed) {
  RunConfig c;
  c.nx = nx;
  c.ny = ny;
  c.m = m;
  if (coarse == "corners") c.coarse = CoarseKind::corners;
  else if (coarse == "corners-edges") c.coarse = CoarseKind::corners_edges;
  else throw std::invalid_argument("coarse must be 'corners' or 'corners-edges'");
  if (scaling == "multiplicity") c.scaling = ScalingKind::multiplicity;
  else if (scaling == "stiffness") c.scaling = ScalingKind::stiffness;
  else throw std::invalid_argument("scaling must be 'multiplicity' or 'stiffness'");
  c.rho_ratio = rho_ratio;
  c.pcg.tol = tol;
  c.pcg.maxit = maxit;
  c.seed = seed;
  return c;
}

Stage parse_stage(const std::string& s) {
  if (s == "all") return Stage::all;
  if (s == "axioms") return Stage::axioms;
  if (s == "spectra") return Stage::spectra;
  if (s == "pcg") return Stage::solvers;
  throw std::invalid_argument("stage must be one of all, axioms, spectra, pcg");
}

} // namespace

PYBIND11_MODULE(_ddlab, m) {
  m.doc() = "BDDC and FETI-DP verification on a substructured Q1 Poisson problem";

  auto singular = py::register_exception<NotPositiveDefinite>(m, "NotPositiveDefinite", PyExc_ArithmeticError);
  py::register_exception<EmptyCoarseSpace>(m, "EmptyCoarseSpace", singular.ptr());

  m.def(
      "run_json",
      [](int nx, int ny, int mm, const std::string& coarse, const std::string& scaling, double rho_ratio,
         double tol, int maxit, std::uint64_t seed, const std::string& stage) {
        const RunConfig c = make_config(nx, ny, mm, coarse, scaling, rho_ratio, tol, maxit, seed);
        const Instance inst = build_instance(c);
        return evaluation_json(inst, evaluate(inst, parse_stage(stage))).dump();
      },
      py::arg("nx") = 2, py::arg("ny") = 2, py::arg("m") = 2, py::arg("coarse") = "corners",
      py::arg("scaling") = "multiplicity", py::arg("rho_ratio") = 1.0, py::arg("tol") = 1e-12,
      py::arg("maxit") = 1000, py::arg("seed") = 0, py::arg("stage") = "all");

  m.def(
      "spectra",
      [](int nx, int ny, int mm, const std::string& coarse, const std::string& scaling, double rho_ratio) {
        const RunConfig c = make_config(nx, ny, mm, coarse, scaling, rho_ratio, 1e-12, 1000, 0);
        const Instance inst = build_instance(c);
        const Evaluation e = evaluate(inst, Stage::spectra);
        return py::make_tuple(to_array(e.spectra->eig_bddc), to_array(e.spectra->eig_feti));
      },
      py::arg("nx") = 2, py::arg("ny") = 2, py::arg("m") = 2, py::arg("coarse") = "corners",
      py::arg("scaling") = "multiplicity", py::arg("rho_ratio") = 1.0);

  m.def(
      "harness_json",
      [](std::size_t instances, std::size_t n_max, std::uint64_t seed, bool fault) {
        HarnessOptions o;
        o.instances = instances;
        o.n_max = n_max;
        o.seed = seed;
        o.inject_fault = fault;
        return harness_json(o, run_harness(o)).dump();
      },
      py::arg("instances") = 200, py::arg("n_max") = 30, py::arg("seed") = 7, py::arg("fault") = false);

  m.def("sym_eig", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    const EigenDecomposition d = sym_eig(to_sym(a));
    return py::make_tuple(to_array(d.values), to_array(d.vectors));
  });

  m.def("gen_eig_spd", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& mm,
                          const py::array_t<double, py::array::c_style | py::array::forcecast>& k) {
    return to_array(gen_eig_spd(to_sym(mm), to_sym(k)));
  });
}
