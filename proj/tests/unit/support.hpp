#pragma once

#include "ddlab/pipeline.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace ddlab::test {

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

inline Eigen::MatrixXd to_eigen(const SymMatrix& s) { return to_eigen(s.dense()); }

inline Eigen::VectorXd to_eigen(const Vec& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Vec to_vec(const Eigen::VectorXd& v) { return Vec(v.data(), v.data() + v.size()); }

inline SymMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  Matrix m(n, n);
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return SymMatrix::symmetrize(m);
}

inline RunConfig config(int nx, int ny, int m, CoarseKind coarse = CoarseKind::corners,
                        ScalingKind scaling = ScalingKind::multiplicity, double rho = 1.0) {
  RunConfig c;
  c.nx = nx;
  c.ny = ny;
  c.m = m;
  c.coarse = coarse;
  c.scaling = scaling;
  c.rho_ratio = rho;
  return c;
}

inline Instance instance(int nx, int ny, int m, CoarseKind coarse = CoarseKind::corners,
                         ScalingKind scaling = ScalingKind::multiplicity, double rho = 1.0) {
  return build_instance(config(nx, ny, m, coarse, scaling, rho));
}

struct Case {
  int nx, ny, m;
  ScalingKind scaling;
  double rho;
  CoarseKind coarse;

  std::string name() const {
    return std::to_string(nx) + "x" + std::to_string(ny) + "_m" + std::to_string(m) +
           (scaling == ScalingKind::multiplicity ? "_mult" : "_stiff") + (rho == 1.0 ? "_uniform" : "_checker") +
           (coarse == CoarseKind::corners ? "_corners" : "_edges");
  }
};

/// grids {2x2, 3x3, 4x2} x m {2, 4} x both scalings x rho {1, checkerboard 1000} x both coarse kinds
inline std::vector<Case> case_matrix() {
  std::vector<Case> out;
  const int grids[][2] = {{2, 2}, {3, 3}, {4, 2}};
  for (const auto& g : grids)
    for (int m : {2, 4})
      for (ScalingKind s : {ScalingKind::multiplicity, ScalingKind::stiffness})
        for (double rho : {1.0, 1000.0})
          for (CoarseKind c : {CoarseKind::corners, CoarseKind::corners_edges})
            out.push_back({g[0], g[1], m, s, rho, c});
  return out;
}

inline Instance instance(const Case& c) { return instance(c.nx, c.ny, c.m, c.coarse, c.scaling, c.rho); }

inline double max_abs_diff(const Vec& a, const Vec& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline double rel_diff(const Vec& a, const Vec& b) {
  const double denom = norm2(b);
  const double diff = norm2(subtract(a, b));
  return denom > 0.0 ? diff / denom : diff;
}

} // namespace ddlab::test
