#pragma once

/** @file linalg.hpp
    @brief Dense linear algebra used by every other part of the library.

    Matrices are small (a few hundred rows at most), so everything is dense and
    row-major. Symmetric operators have their own type that keeps the two
    triangles bit-identical. Eigenvalues of products m*k of a symmetric
    semidefinite and a symmetric definite matrix are always obtained through the
    congruence transform L^T m L with k = L L^T, never from the nonsymmetric
    product itself.
*/

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddlab {

using Vec = std::vector<double>;

class DimensionMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by the Cholesky factorization when a pivot falls below
/// n * eps * max(initial diagonal).
class NotPositiveDefinite : public std::runtime_error {
public:
  NotPositiveDefinite(std::size_t pivot, double pivot_value, const std::string& context = {});

  /// Zero-based index of the failing pivot.
  std::size_t pivot() const noexcept { return pivot_; }
  double pivot_value() const noexcept { return pivot_value_; }

private:
  std::size_t pivot_;
  double pivot_value_;
};

class EigenNotConverged : public std::runtime_error {
public:
  explicit EigenNotConverged(double off_norm);
  double off_norm() const noexcept { return off_norm_; }

private:
  double off_norm_;
};

class SingularMatrix : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  Vec column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const double> values);

  Matrix transpose() const;

  const std::vector<double>& data() const noexcept { return data_; }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double alpha, const Matrix& a);

/// a * x
Vec multiply(const Matrix& a, std::span<const double> x);
/// a^T * x
Vec multiply_transpose(const Matrix& a, std::span<const double> x);

double max_abs(const Matrix& a);
double frobenius_norm(const Matrix& a);

/// Symmetric matrix. Writes go to both triangles, so (i,j) and (j,i) are
/// always the same double.
class SymMatrix {
public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n) : m_(n, n) {}

  static SymMatrix identity(std::size_t n);
  static SymMatrix diagonal(std::span<const double> d);
  /// (a + a^T) / 2.
  static SymMatrix symmetrize(const Matrix& a);

  std::size_t size() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  void set(std::size_t i, std::size_t j, double v);
  void add(std::size_t i, std::size_t j, double v);

  const Matrix& dense() const noexcept { return m_; }

private:
  Matrix m_;
};

Vec multiply(const SymMatrix& a, std::span<const double> x);

/// r^T s r, symmetrized.
SymMatrix congruence(const Matrix& r, const SymMatrix& s);

/// a^T a, symmetrized.
SymMatrix gram(const Matrix& a);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
Vec add(std::span<const double> x, std::span<const double> y);
Vec subtract(std::span<const double> x, std::span<const double> y);
Vec scaled(double alpha, std::span<const double> x);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

// ---------------------------------------------------------------------------
// Cholesky

/// Lower-triangular factor L with a = L L^T.
class CholFactor {
public:
  CholFactor() = default;
  explicit CholFactor(Matrix lower) : lower_(std::move(lower)) {}

  std::size_t size() const noexcept { return lower_.rows(); }
  const Matrix& lower() const noexcept { return lower_; }

private:
  Matrix lower_;
};

CholFactor cholesky(const SymMatrix& a);

Vec chol_solve(const CholFactor& f, std::span<const double> b);
/// Solves column by column.
Matrix chol_solve(const CholFactor& f, const Matrix& b);

/// L^{-1} b
Vec forward_solve(const CholFactor& f, std::span<const double> b);
/// L^{-T} b
Vec backward_solve(const CholFactor& f, std::span<const double> b);

double log_determinant(const CholFactor& f);

// ---------------------------------------------------------------------------
// Eigenvalues

struct EigenDecomposition {
  Vec values;     ///< ascending
  Matrix vectors; ///< orthonormal columns, column j belongs to values[j]
};

struct JacobiOptions {
  int max_sweeps = 30;
  double relative_threshold = 1e-13;
};

/// Cyclic Jacobi. Throws EigenNotConverged if the off-diagonal Frobenius norm
/// is still above threshold * ||a||_F after max_sweeps sweeps.
EigenDecomposition sym_eig(const SymMatrix& a, const JacobiOptions& options = {});

/// Eigenvalues of the product m*k, m symmetric semidefinite, k symmetric
/// positive definite. Computed as sym_eig(L^T m L) with k = L L^T.
Vec gen_eig_spd(const SymMatrix& m, const SymMatrix& k);

/// ||p||_s^2 = max_v ||p v||_s^2 / ||v||_s^2 for s positive definite.
double energy_op_norm_sq(const Matrix& p, const SymMatrix& s);

// ---------------------------------------------------------------------------
// Factorizations for rectangular and general square matrices

struct QrResult {
  Matrix q; ///< rows x min(rows, cols), orthonormal columns
  Matrix r; ///< min(rows, cols) x cols, upper triangular with r(i,i) >= 0
};

/// Householder QR, thin form, signs fixed so that diag(r) is nonnegative.
QrResult householder_qr(const Matrix& a);

/// Orthonormal basis of range(a) from QR with column pivoting. A column is kept
/// while its pivot norm exceeds rel_tol * frobenius_norm(a).
Matrix range_basis(const Matrix& a, double rel_tol = 1e-10);

std::size_t numerical_rank(const Matrix& a, double rel_tol = 1e-10);

/// a^{-1} b via LU with partial pivoting. Throws SingularMatrix.
Matrix solve_general(const Matrix& a, const Matrix& b);

} // namespace ddlab
