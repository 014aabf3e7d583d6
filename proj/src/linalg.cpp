#include "ddlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace ddlab {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

void require(bool ok, const char* what) {
  if (!ok) throw DimensionMismatch(what);
}

std::string pivot_message(std::size_t pivot, double value, const std::string& context) {
  std::ostringstream os;
  os << "matrix is not positive definite: pivot " << pivot << " has value " << value;
  if (!context.empty()) os << " (" << context << ")";
  return os.str();
}

} // namespace

NotPositiveDefinite::NotPositiveDefinite(std::size_t pivot, double pivot_value,
                                         const std::string& context)
    : std::runtime_error(pivot_message(pivot, pivot_value, context)), pivot_(pivot),
      pivot_value_(pivot_value) {}

EigenNotConverged::EigenNotConverged(double off_norm)
    : std::runtime_error("Jacobi eigensolver did not converge, off-diagonal norm " +
                         std::to_string(off_norm)),
      off_norm_(off_norm) {}

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vec Matrix::column(std::size_t j) const {
  Vec c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

void Matrix::set_column(std::size_t j, std::span<const double> values) {
  require(values.size() == rows_, "set_column: length mismatch");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = values[i];
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "matrix product: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix sum: shapes differ");
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) += b(i, j);
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix difference: shapes differ");
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) -= b(i, j);
  return c;
}

Matrix operator*(double alpha, const Matrix& a) {
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (auto& v : c.row(i)) v *= alpha;
  return c;
}

Vec multiply(const Matrix& a, std::span<const double> x) {
  require(a.cols() == x.size(), "matrix-vector product: length mismatch");
  Vec y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

Vec multiply_transpose(const Matrix& a, std::span<const double> x) {
  require(a.rows() == x.size(), "transposed matrix-vector product: length mismatch");
  Vec y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (x[i] == 0.0) continue;
    axpy(x[i], a.row(i), y);
  }
  return y;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double frobenius_norm(const Matrix& a) { return norm2(a.data()); }

// ---------------------------------------------------------------------------
// SymMatrix

SymMatrix SymMatrix::identity(std::size_t n) {
  SymMatrix s(n);
  for (std::size_t i = 0; i < n; ++i) s.set(i, i, 1.0);
  return s;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  SymMatrix s(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) s.set(i, i, d[i]);
  return s;
}

SymMatrix SymMatrix::symmetrize(const Matrix& a) {
  require(a.rows() == a.cols(), "symmetrize: matrix is not square");
  SymMatrix s(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j) s.set(i, j, 0.5 * (a(i, j) + a(j, i)));
  return s;
}

void SymMatrix::set(std::size_t i, std::size_t j, double v) {
  m_(i, j) = v;
  m_(j, i) = v;
}

void SymMatrix::add(std::size_t i, std::size_t j, double v) {
  m_(i, j) += v;
  if (i != j) m_(j, i) = m_(i, j);
}

Vec multiply(const SymMatrix& a, std::span<const double> x) { return multiply(a.dense(), x); }

SymMatrix congruence(const Matrix& r, const SymMatrix& s) {
  require(r.rows() == s.size(), "congruence: dimension mismatch");
  return SymMatrix::symmetrize(r.transpose() * (s.dense() * r));
}

SymMatrix gram(const Matrix& a) { return SymMatrix::symmetrize(a.transpose() * a); }

// ---------------------------------------------------------------------------
// Vectors

double dot(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) {
  // scaled to avoid overflow for large entries
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double v : x) s += (v / scale) * (v / scale);
  return scale * std::sqrt(s);
}

Vec add(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "add: length mismatch");
  Vec z(x.begin(), x.end());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += y[i];
  return z;
}

Vec subtract(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "subtract: length mismatch");
  Vec z(x.begin(), x.end());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] -= y[i];
  return z;
}

Vec scaled(double alpha, std::span<const double> x) {
  Vec z(x.begin(), x.end());
  for (auto& v : z) v *= alpha;
  return z;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require(x.size() == y.size(), "axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// ---------------------------------------------------------------------------
// Cholesky

CholFactor cholesky(const SymMatrix& a) {
  const std::size_t n = a.size();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, a(i, i));
  const double pivot_tol = static_cast<double>(n) * eps * max_diag;

  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > pivot_tol)) throw NotPositiveDefinite(j, d);
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return CholFactor(std::move(l));
}

Vec forward_solve(const CholFactor& f, std::span<const double> b) {
  require(f.size() == b.size(), "forward_solve: length mismatch");
  const Matrix& l = f.lower();
  Vec y(b.begin(), b.end());
  for (std::size_t i = 0; i < y.size(); ++i) {
    double s = y[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  return y;
}

Vec backward_solve(const CholFactor& f, std::span<const double> b) {
  require(f.size() == b.size(), "backward_solve: length mismatch");
  const Matrix& l = f.lower();
  Vec x(b.begin(), b.end());
  for (std::size_t ii = x.size(); ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < x.size(); ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
  return x;
}

Vec chol_solve(const CholFactor& f, std::span<const double> b) {
  return backward_solve(f, forward_solve(f, b));
}

Matrix chol_solve(const CholFactor& f, const Matrix& b) {
  require(f.size() == b.rows(), "chol_solve: row mismatch");
  Matrix x(b.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) x.set_column(j, chol_solve(f, b.column(j)));
  return x;
}

double log_determinant(const CholFactor& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += 2.0 * std::log(f.lower()(i, i));
  return s;
}

// ---------------------------------------------------------------------------
// Jacobi eigensolver

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

void rotate(Matrix& a, std::size_t i, std::size_t j, std::size_t k, std::size_t l, double s,
            double tau) {
  const double g = a(i, j);
  const double h = a(k, l);
  a(i, j) = g - s * (h + g * tau);
  a(k, l) = h + s * (g - h * tau);
}

} // namespace

EigenDecomposition sym_eig(const SymMatrix& input, const JacobiOptions& options) {
  const std::size_t n = input.size();
  Matrix a = input.dense();
  Matrix v = Matrix::identity(n);

  const double threshold = options.relative_threshold * frobenius_norm(a);
  int sweep = 0;
  for (;; ++sweep) {
    const double off = off_diagonal_norm(a);
    if (off <= threshold) break;
    if (sweep >= options.max_sweeps) throw EigenNotConverged(off);

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double g = 100.0 * std::abs(apq);
        // negligible against both diagonal entries: drop it
        if (sweep > 3 && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
            std::abs(a(q, q)) + g == std::abs(a(q, q))) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const double h = a(q, q) - a(p, p);
        double t;
        if (std::abs(h) + g == std::abs(h)) {
          t = apq / h;
        } else {
          const double theta = 0.5 * h / apq;
          t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          rotate(a, r, p, r, q, s, tau);
          a(p, r) = a(r, p);
          a(q, r) = a(r, q);
        }
        for (std::size_t r = 0; r < n; ++r) rotate(v, r, p, r, q, s, tau);
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

  EigenDecomposition out{Vec(n), Matrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

Vec gen_eig_spd(const SymMatrix& m, const SymMatrix& k) {
  require(m.size() == k.size(), "gen_eig_spd: dimension mismatch");
  const CholFactor f = cholesky(k);
  return sym_eig(congruence(f.lower(), m)).values;
}

double energy_op_norm_sq(const Matrix& p, const SymMatrix& s) {
  require(p.rows() == p.cols() && p.rows() == s.size(), "energy_op_norm_sq: dimension mismatch");
  const std::size_t n = s.size();
  if (n == 0) return 0.0;
  const CholFactor f = cholesky(s);
  // y = p L^{-T}, row by row: (y^T)_j = L^{-1} (p^T)_j
  const Matrix pt = p.transpose();
  Matrix yt(n, n);
  for (std::size_t j = 0; j < n; ++j) yt.set_column(j, forward_solve(f, pt.column(j)));
  const Matrix g = f.lower().transpose() * yt.transpose();
  const Vec values = sym_eig(gram(g)).values;
  return std::max(0.0, values.back());
}

// ---------------------------------------------------------------------------
// QR and general solves

namespace {

struct Householder {
  Matrix r;
  std::vector<Vec> reflectors; // reflector j acts on rows j..m-1
  std::vector<std::size_t> permutation;
  std::size_t rank = 0;
};

Householder householder(Matrix a, bool pivot, double abs_tol) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  const std::size_t steps = std::min(m, n);
  Householder h;
  h.permutation.resize(n);
  std::iota(h.permutation.begin(), h.permutation.end(), std::size_t{0});

  for (std::size_t j = 0; j < steps; ++j) {
    if (pivot) {
      std::size_t best = j;
      double best_norm = -1.0;
      for (std::size_t c = j; c < n; ++c) {
        double s = 0.0;
        for (std::size_t i = j; i < m; ++i) s += a(i, c) * a(i, c);
        if (s > best_norm) {
          best_norm = s;
          best = c;
        }
      }
      if (std::sqrt(best_norm) <= abs_tol) break;
      if (best != j) {
        for (std::size_t i = 0; i < m; ++i) std::swap(a(i, j), a(i, best));
        std::swap(h.permutation[j], h.permutation[best]);
      }
    }

    Vec x(m - j);
    for (std::size_t i = j; i < m; ++i) x[i - j] = a(i, j);
    const double xnorm = norm2(x);
    Vec v = x;
    if (xnorm > 0.0) {
      const double alpha = x[0] >= 0.0 ? -xnorm : xnorm;
      v[0] -= alpha;
      const double vnorm = norm2(v);
      if (vnorm > 0.0)
        for (auto& e : v) e /= vnorm;
      for (std::size_t c = j; c < n; ++c) {
        double s = 0.0;
        for (std::size_t i = j; i < m; ++i) s += v[i - j] * a(i, c);
        for (std::size_t i = j; i < m; ++i) a(i, c) -= 2.0 * s * v[i - j];
      }
    } else {
      std::fill(v.begin(), v.end(), 0.0);
    }
    h.reflectors.push_back(std::move(v));
    h.rank = j + 1;
  }
  h.r = std::move(a);
  return h;
}

Matrix thin_q(const Householder& h, std::size_t m, std::size_t cols) {
  Matrix q(m, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    Vec e(m, 0.0);
    e[c] = 1.0;
    for (std::size_t jj = h.reflectors.size(); jj-- > 0;) {
      const Vec& v = h.reflectors[jj];
      double s = 0.0;
      for (std::size_t i = jj; i < m; ++i) s += v[i - jj] * e[i];
      for (std::size_t i = jj; i < m; ++i) e[i] -= 2.0 * s * v[i - jj];
    }
    q.set_column(c, e);
  }
  return q;
}

} // namespace

QrResult householder_qr(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  const std::size_t k = std::min(m, n);
  const Householder h = householder(a, false, 0.0);
  QrResult out{thin_q(h, m, k), Matrix(k, n)};
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < n; ++j) out.r(i, j) = h.r(i, j);
  for (std::size_t i = 0; i < k; ++i) {
    if (out.r(i, i) >= 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) out.r(i, j) = -out.r(i, j);
    for (std::size_t r = 0; r < m; ++r) out.q(r, i) = -out.q(r, i);
  }
  return out;
}

Matrix range_basis(const Matrix& a, double rel_tol) {
  const double tol = rel_tol * frobenius_norm(a);
  const Householder h = householder(a, true, tol);
  return thin_q(h, a.rows(), h.rank);
}

std::size_t numerical_rank(const Matrix& a, double rel_tol) {
  if (a.empty()) return 0;
  const double tol = rel_tol * frobenius_norm(a);
  if (tol == 0.0) return 0;
  return householder(a, true, tol).rank;
}

Matrix solve_general(const Matrix& a, const Matrix& b) {
  require(a.rows() == a.cols() && a.rows() == b.rows(), "solve_general: dimension mismatch");
  const std::size_t n = a.rows();
  Matrix lu = a;
  Matrix x = b;
  const double tol = static_cast<double>(n) * eps * max_abs(a);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t p = j;
    for (std::size_t i = j + 1; i < n; ++i)
      if (std::abs(lu(i, j)) > std::abs(lu(p, j))) p = i;
    if (!(std::abs(lu(p, j)) > tol)) throw SingularMatrix("solve_general: matrix is singular");
    if (p != j) {
      for (std::size_t c = 0; c < n; ++c) std::swap(lu(p, c), lu(j, c));
      for (std::size_t c = 0; c < x.cols(); ++c) std::swap(x(p, c), x(j, c));
    }
    for (std::size_t i = j + 1; i < n; ++i) {
      const double f = lu(i, j) / lu(j, j);
      if (f == 0.0) continue;
      for (std::size_t c = j; c < n; ++c) lu(i, c) -= f * lu(j, c);
      for (std::size_t c = 0; c < x.cols(); ++c) x(i, c) -= f * x(j, c);
    }
  }
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      double s = x(ii, c);
      for (std::size_t k = ii + 1; k < n; ++k) s -= lu(ii, k) * x(k, c);
      x(ii, c) = s / lu(ii, ii);
    }
  }
  return x;
}

} // namespace ddlab
