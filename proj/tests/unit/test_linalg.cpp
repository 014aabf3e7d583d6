#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace ddlab;
using ddlab::test::from_rows;
using ddlab::test::to_eigen;

namespace {

Matrix lower_times_transpose(const CholFactor& f) { return f.lower() * f.lower().transpose(); }

SymMatrix laplacian_1d(std::size_t n) {
  SymMatrix a(n);
  for (std::size_t i = 0; i < n; ++i) {
    a.set(i, i, 2.0);
    if (i + 1 < n) a.set(i, i + 1, -1.0);
  }
  return a;
}

SymMatrix random_symmetric(std::size_t n, Rng& rng) {
  return SymMatrix::symmetrize(random_gaussian(n, n, rng));
}

} // namespace

TEST(Cholesky, HandFactorization) {
  const CholFactor f = cholesky(from_rows({{4, 2}, {2, 3}}));
  EXPECT_DOUBLE_EQ(f.lower()(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(f.lower()(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(f.lower()(1, 0), 1.0);
  EXPECT_NEAR(f.lower()(1, 1), std::sqrt(2.0), 1e-15);
}

TEST(Cholesky, IdentityFactorsToIdentity) {
  const CholFactor f = cholesky(SymMatrix::identity(3));
  EXPECT_EQ(max_abs(f.lower() - Matrix::identity(3)), 0.0);
}

TEST(Cholesky, IndefiniteFailsAtSecondPivot) {
  try {
    cholesky(from_rows({{1, 2}, {2, 1}}));
    FAIL() << "expected NotPositiveDefinite";
  } catch (const NotPositiveDefinite& e) {
    EXPECT_EQ(e.pivot(), 1u); // zero-based: the second pivot
    EXPECT_NEAR(e.pivot_value(), -3.0, 1e-14);
  }
}

TEST(Cholesky, SingularPivotBelowTolerance) {
  EXPECT_THROW(cholesky(from_rows({{1, 1}, {1, 1}})), NotPositiveDefinite);
}

TEST(Cholesky, ReconstructsRandomSpd) {
  Rng rng(11);
  for (std::size_t n : {1u, 7u, 50u, 200u}) {
    const SymMatrix a = random_spd(n, 1e3, rng);
    const CholFactor f = cholesky(a);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_GT(f.lower()(i, i), 0.0);
      for (std::size_t j = i + 1; j < n; ++j) EXPECT_EQ(f.lower()(i, j), 0.0);
    }
    EXPECT_LE(frobenius_norm(lower_times_transpose(f) - a.dense()) / frobenius_norm(a.dense()), 1e-12) << n;
  }
}

TEST(CholSolve, HandExamples) {
  EXPECT_EQ(chol_solve(cholesky(SymMatrix::identity(2)), Vec{1, 2}), (Vec{1, 2}));
  const Vec x = chol_solve(cholesky(from_rows({{4, 2}, {2, 3}})), Vec{6, 5});
  EXPECT_NEAR(x[0], 1.0, 1e-15);
  EXPECT_NEAR(x[1], 1.0, 1e-15);
  const Vec d = chol_solve(cholesky(SymMatrix::diagonal(Vec{2, 4})), Vec{2, 4});
  EXPECT_NEAR(d[0], 1.0, 1e-15);
  EXPECT_NEAR(d[1], 1.0, 1e-15);
}

TEST(CholSolve, ResidualAtCondition1e8) {
  Rng rng(3);
  const SymMatrix a = random_spd(40, 1e8, rng);
  const CholFactor f = cholesky(a);
  const Vec b = multiply(a, random_gaussian(40, 1, rng).column(0));
  const Vec x = chol_solve(f, b);
  EXPECT_LE(norm2(subtract(multiply(a, x), b)), 1e-10 * norm2(b));

  // arbitrary b: the residual is small relative to ||A|| ||x||, not to ||b||
  const Vec c = random_gaussian(40, 1, rng).column(0);
  const Vec y = chol_solve(f, c);
  const double anorm = frobenius_norm(a.dense());
  EXPECT_LE(norm2(subtract(multiply(a, y), c)), 1e-13 * anorm * norm2(y));
}

TEST(CholSolve, DimensionMismatch) {
  EXPECT_THROW(chol_solve(cholesky(SymMatrix::identity(2)), Vec{1, 2, 3}), DimensionMismatch);
}

TEST(CholSolve, TriangularHalves) {
  const SymMatrix a = from_rows({{4, 2}, {2, 3}});
  const CholFactor f = cholesky(a);
  const Vec b{1.0, -2.0};
  EXPECT_LE(ddlab::test::max_abs_diff(backward_solve(f, forward_solve(f, b)), chol_solve(f, b)), 1e-15);
  EXPECT_NEAR(log_determinant(f), std::log(8.0), 1e-14);
}

TEST(SymEig, DiagonalSorted) {
  const EigenDecomposition d = sym_eig(SymMatrix::diagonal(Vec{3, 1, 2}));
  EXPECT_EQ(d.values, (Vec{1, 2, 3}));
}

TEST(SymEig, TwoByTwo) {
  const EigenDecomposition d = sym_eig(from_rows({{2, -1}, {-1, 2}}));
  EXPECT_NEAR(d.values[0], 1.0, 1e-14);
  EXPECT_NEAR(d.values[1], 3.0, 1e-14);
}

TEST(SymEig, TridiagonalThree) {
  const EigenDecomposition d = sym_eig(laplacian_1d(3));
  EXPECT_NEAR(d.values[0], 2.0 - std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(d.values[1], 2.0, 1e-14);
  EXPECT_NEAR(d.values[2], 2.0 + std::sqrt(2.0), 1e-14);
}

TEST(SymEig, AnalyticLaplacianSpectrum) {
  for (std::size_t n : {5u, 20u, 64u}) {
    const EigenDecomposition d = sym_eig(laplacian_1d(n));
    for (std::size_t k = 1; k <= n; ++k) {
      const double exact = 2.0 - 2.0 * std::cos(k * std::numbers::pi / (n + 1));
      EXPECT_LE(std::abs(d.values[k - 1] - exact), 1e-10 * exact) << n << " " << k;
    }
  }
}

TEST(SymEig, ResidualOrthonormalityTraceDeterminant) {
  Rng rng(5);
  for (std::size_t n : {2u, 9u, 30u}) {
    const SymMatrix a = random_spd(n, 1e2, rng);
    const EigenDecomposition d = sym_eig(a);
    const double anorm = frobenius_norm(a.dense());
    EXPECT_TRUE(std::is_sorted(d.values.begin(), d.values.end()));
    for (std::size_t j = 0; j < n; ++j) {
      const Vec v = d.vectors.column(j);
      EXPECT_LE(norm2(subtract(multiply(a, v), scaled(d.values[j], v))), 1e-10 * anorm);
    }
    EXPECT_LE(max_abs(d.vectors.transpose() * d.vectors - Matrix::identity(n)), 1e-12);

    double trace = 0.0, logdet = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += a(i, i);
    for (double l : d.values) logdet += std::log(l);
    double sum = 0.0;
    for (double l : d.values) sum += l;
    EXPECT_LE(std::abs(sum - trace), 1e-10 * std::abs(trace));
    EXPECT_LE(std::abs(std::exp(logdet - log_determinant(cholesky(a))) - 1.0), 1e-10);
  }
}

TEST(SymEig, AgreesWithEigenOnIndefiniteMatrix) {
  Rng rng(8);
  const SymMatrix a = random_symmetric(12, rng);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(to_eigen(a));
  const EigenDecomposition d = sym_eig(a);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_NEAR(d.values[i], ref.eigenvalues()(i), 1e-12);
}

TEST(SymEig, SweepBudgetExhausted) {
  JacobiOptions opts;
  opts.max_sweeps = 0;
  EXPECT_THROW(sym_eig(from_rows({{2, -1}, {-1, 2}}), opts), EigenNotConverged);
}

TEST(SymEig, EmptyMatrix) { EXPECT_TRUE(sym_eig(SymMatrix(0)).values.empty()); }

TEST(GenEig, InversePairGivesOnes) {
  Rng rng(2);
  const SymMatrix k = random_spd(6, 50.0, rng);
  Matrix kinv(6, 6);
  const CholFactor f = cholesky(k);
  for (std::size_t j = 0; j < 6; ++j) {
    Vec e(6, 0.0);
    e[j] = 1.0;
    kinv.set_column(j, chol_solve(f, e));
  }
  for (double l : gen_eig_spd(SymMatrix::symmetrize(kinv), k)) EXPECT_NEAR(l, 1.0, 1e-12);
}

TEST(GenEig, HandExamples) {
  const Vec a = gen_eig_spd(SymMatrix::identity(2), SymMatrix::diagonal(Vec{1, 4}));
  EXPECT_NEAR(a[0], 1.0, 1e-15);
  EXPECT_NEAR(a[1], 4.0, 1e-15);
  const Vec b = gen_eig_spd(from_rows({{2, 0}, {0, 0}}), SymMatrix::identity(2));
  EXPECT_NEAR(b[0], 0.0, 1e-15);
  EXPECT_NEAR(b[1], 2.0, 1e-15);
}

TEST(GenEig, MatchesMatrixSquareRootOracle) {
  Rng rng(21);
  for (std::size_t n = 1; n <= 6; ++n) {
    const Matrix g = random_gaussian(n, n, rng);
    const SymMatrix m = gram(g);
    const SymMatrix k = random_spd(n, 1e3, rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ks(to_eigen(k));
    const Eigen::MatrixXd root = ks.operatorSqrt();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(root * to_eigen(m) * root);
    const Vec got = gen_eig_spd(m, k);
    for (std::size_t i = 0; i < n; ++i)
      EXPECT_LE(std::abs(got[i] - ref.eigenvalues()(i)), 1e-10 * std::max(1.0, ref.eigenvalues()(n - 1)));
  }
}

TEST(GenEig, EqualsReductionByConstruction) {
  Rng rng(4);
  const SymMatrix m = gram(random_gaussian(5, 5, rng));
  const SymMatrix k = random_spd(5, 10.0, rng);
  const Vec direct = sym_eig(congruence(cholesky(k).lower(), m)).values;
  EXPECT_EQ(gen_eig_spd(m, k), direct);
}

TEST(GenEig, PropagatesIndefiniteK) {
  EXPECT_THROW(gen_eig_spd(SymMatrix::identity(2), from_rows({{1, 2}, {2, 1}})), NotPositiveDefinite);
}

TEST(EnergyNorm, Examples) {
  Rng rng(6);
  const SymMatrix s = random_spd(4, 100.0, rng);
  EXPECT_NEAR(energy_op_norm_sq(Matrix::identity(4), s), 1.0, 1e-12);
  EXPECT_EQ(energy_op_norm_sq(Matrix(4, 4), s), 0.0);
  Matrix p(2, 2);
  p(0, 0) = 1.0;
  p(0, 1) = 1.0;
  EXPECT_NEAR(energy_op_norm_sq(p, SymMatrix::identity(2)), 2.0, 1e-14);
}

TEST(EnergyNorm, NontrivialProjectionsHaveNormAtLeastOne) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const std::size_t k = 1 + trial % (n - 1);
    const LtPair lt = make_LT(n, k, rng);
    const Matrix p = lt.t * lt.l;
    ASSERT_LE(max_abs(p * p - p), 1e-11);
    EXPECT_GE(energy_op_norm_sq(p, random_spd(n, 1e4, rng)), 1.0 - 1e-10);
  }
}

TEST(EnergyNorm, MatchesEigenOracle) {
  Rng rng(12);
  const Matrix p = random_gaussian(5, 5, rng);
  const SymMatrix s = random_spd(5, 1e3, rng);
  // max generalized eigenvalue of (p^T s p, s)
  const Eigen::MatrixXd ps = to_eigen(p).transpose() * to_eigen(s) * to_eigen(p);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ref(ps, to_eigen(s));
  const double expected = ref.eigenvalues().maxCoeff();
  EXPECT_LE(std::abs(energy_op_norm_sq(p, s) - expected), 1e-10 * expected);
}

TEST(Qr, HouseholderReconstructs) {
  Rng rng(13);
  const Matrix a = random_gaussian(7, 4, rng);
  const QrResult qr = householder_qr(a);
  EXPECT_LE(max_abs(qr.q * qr.r - a), 1e-13);
  EXPECT_LE(max_abs(qr.q.transpose() * qr.q - Matrix::identity(4)), 1e-14);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_GE(qr.r(i, i), 0.0);
    for (std::size_t j = 0; j < i; ++j) EXPECT_EQ(qr.r(i, j), 0.0);
  }
}

TEST(Qr, RangeBasisAndRank) {
  Rng rng(14);
  const Matrix b = random_gaussian(8, 3, rng);
  const Matrix a = b * random_gaussian(3, 6, rng); // rank 3
  EXPECT_EQ(numerical_rank(a), 3u);
  const Matrix q = range_basis(a);
  ASSERT_EQ(q.cols(), 3u);
  EXPECT_LE(max_abs(q.transpose() * q - Matrix::identity(3)), 1e-13);
  // columns of a lie in range(q)
  EXPECT_LE(max_abs(q * (q.transpose() * a) - a), 1e-12 * max_abs(a));
  EXPECT_EQ(numerical_rank(Matrix(3, 3)), 0u);
}

TEST(SolveGeneral, LuSolvesAndDetectsSingular) {
  Rng rng(15);
  const Matrix a = random_gaussian(5, 5, rng);
  const Matrix x = random_gaussian(5, 2, rng);
  EXPECT_LE(max_abs(solve_general(a, a * x) - x), 1e-12);
  Matrix s(2, 2);
  s(0, 0) = 1.0;
  s(0, 1) = 2.0;
  s(1, 0) = 2.0;
  s(1, 1) = 4.0;
  EXPECT_THROW(solve_general(s, Matrix::identity(2)), SingularMatrix);
}

TEST(SymMatrix, WritesMirror) {
  SymMatrix a(3);
  a.set(0, 2, 5.0);
  a.add(2, 0, 1.0);
  EXPECT_EQ(a(0, 2), 6.0);
  EXPECT_EQ(a(2, 0), 6.0);
}
