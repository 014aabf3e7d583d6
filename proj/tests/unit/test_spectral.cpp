#include "support.hpp"

#include <gtest/gtest.h>

using namespace ddlab;
using ddlab::test::case_matrix;
using ddlab::test::instance;
using ddlab::test::to_eigen;

namespace {

SpectralReport report(const Instance& inst) {
  const BddcPreconditioner bddc(inst.ops);
  const FetiDpSystem feti(inst.ops);
  return build_spectral_report(inst.ops, bddc, feti);
}

// One clique {p, q}, weights (1/2, 1/2), S_tilde = I.
OperatorSet two_dof_clique() {
  OperatorSet ops;
  ops.s_tilde = SymMatrix::identity(2);
  ops.rt = Matrix::identity(2);
  ops.rh = Matrix(2, 1, 1.0);
  ops.e = Matrix(1, 2, 0.5);
  ops.b = Matrix(1, 2);
  ops.b(0, 0) = 1.0;
  ops.b(0, 1) = -1.0;
  ops.bd = 0.5 * ops.b;
  return ops;
}

} // namespace

TEST(Spectral, TheoremsOnCaseMatrix) {
  for (const auto& tc : case_matrix()) {
    const Instance inst = instance(tc);
    const SpectralReport r = report(inst);
    const TheoremFlags& f = r.flags;
    EXPECT_TRUE(f.thm1_operator_equal) << tc.name() << " " << r.pfetidp_bddc_max_diff;
    EXPECT_TRUE(f.thm2_lower) << tc.name();
    EXPECT_TRUE(f.thm2_upper_bddc) << tc.name();
    EXPECT_TRUE(f.thm2_upper_feti) << tc.name();
    EXPECT_TRUE(f.thm2_omega_equal) << tc.name();
    EXPECT_TRUE(f.thm3_spectra_match) << tc.name() << " " << r.comparison.max_rel_diff;
    EXPECT_TRUE(f.thm3_mult_order) << tc.name();
    EXPECT_TRUE(std::is_sorted(r.eig_bddc.begin(), r.eig_bddc.end()));
    EXPECT_EQ(r.eig_bddc.size(), inst.ops.dim_w_hat());
    EXPECT_EQ(r.eig_feti.size(), inst.ops.dim_lambda());
  }
}

TEST(Spectral, FullyAssembledIsIdentity) {
  const Instance inst = instance(2, 2, 2, CoarseKind::corners_edges);
  const SpectralReport r = report(inst);
  for (double l : r.eig_bddc) EXPECT_NEAR(l, 1.0, 1e-12);
  EXPECT_TRUE(r.eig_feti.empty());
  EXPECT_NEAR(r.omega.bddc, 1.0, 1e-12);
  EXPECT_FALSE(r.omega.feti_dp.has_value());
  EXPECT_TRUE(r.comparison.pass());
  EXPECT_EQ(r.comparison.remaining_bddc, 0u);
  EXPECT_TRUE(r.flags.all());
  EXPECT_FALSE(r.kappa_feti.has_value());
}

TEST(Spectral, BddcOperatorIsShatSelfadjoint) {
  const Instance inst = instance(3, 3, 4, CoarseKind::corners, ScalingKind::stiffness, 1000.0);
  const BddcPreconditioner bddc(inst.ops);
  const FetiDpSystem feti(inst.ops);
  const PreconditionedOperators pre = assemble_preconditioned_ops(inst.ops, bddc, feti);
  const Matrix p = pre.m_bddc.dense() * pre.s_hat.dense();
  const Matrix sp = pre.s_hat.dense() * p;
  EXPECT_LE(max_abs(sp - sp.transpose()), 1e-12 * max_abs(sp));
}

TEST(Spectral, AssembledMatchesDenseCompositions) {
  const Instance inst = instance(4, 2, 4, CoarseKind::corners_edges, ScalingKind::stiffness, 1000.0);
  ASSERT_GT(inst.ops.dim_lambda(), 0u);
  const BddcPreconditioner bddc(inst.ops);
  const FetiDpSystem feti(inst.ops);
  const PreconditionedOperators pre = assemble_preconditioned_ops(inst.ops, bddc, feti);
  const Eigen::MatrixXd st = to_eigen(inst.ops.s_tilde), sti = st.inverse();
  const Eigen::MatrixXd e = to_eigen(inst.ops.e), b = to_eigen(inst.ops.b), bd = to_eigen(inst.ops.bd);
  auto close = [](const SymMatrix& got, const Eigen::MatrixXd& want) {
    return (to_eigen(got) - want).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, want.cwiseAbs().maxCoeff());
  };
  EXPECT_TRUE(close(pre.m_bddc, e * sti * e.transpose()));
  EXPECT_TRUE(close(pre.f, b * sti * b.transpose()));
  EXPECT_TRUE(close(pre.m_feti, bd * st * bd.transpose()));
  EXPECT_TRUE(close(pre.s_hat, to_eigen(inst.ops.rh).transpose() * st * to_eigen(inst.ops.rh)));
}

TEST(Spectral, SpectrumMatchesEigenOracle) {
  const Instance inst = instance(2, 2, 4, CoarseKind::corners, ScalingKind::stiffness, 1000.0);
  const BddcPreconditioner bddc(inst.ops);
  const FetiDpSystem feti(inst.ops);
  const PreconditionedOperators pre = assemble_preconditioned_ops(inst.ops, bddc, feti);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
      to_eigen(pre.s_hat), to_eigen(pre.s_hat) * to_eigen(pre.m_bddc) * to_eigen(pre.s_hat));
  // S_hat x = mu (S_hat M S_hat) x  gives mu = 1 / eig(M S_hat)
  const Vec got = spectrum_bddc(pre.m_bddc, pre.s_hat);
  std::vector<double> want;
  for (Eigen::Index i = 0; i < ges.eigenvalues().size(); ++i) want.push_back(1.0 / ges.eigenvalues()(i));
  std::sort(want.begin(), want.end());
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-9 * want.back());
}

TEST(Spectral, CornersOnTwoByTwoLargestEigenvaluesAgree) {
  const SpectralReport r = report(instance(2, 2, 2));
  ASSERT_FALSE(r.eig_feti.empty());
  EXPECT_NEAR(r.eig_bddc.back(), r.eig_feti.back(), 1e-8 * r.eig_bddc.back());
  EXPECT_LE(r.eig_bddc.back(), r.omega.bddc * (1.0 + 1e-10));
  EXPECT_GE(r.eig_bddc.front(), 1.0 - 1e-10);
}

TEST(Omega, ProjectionPairWithIdentityEnergy) {
  const OmegaBounds w = omega_bounds(two_dof_clique());
  EXPECT_NEAR(w.bddc, 1.0, 1e-15);
  ASSERT_TRUE(w.feti_dp.has_value());
  EXPECT_NEAR(*w.feti_dp, 1.0, 1e-15);
}

TEST(Omega, EqualOnEveryInstanceWithMultipliers) {
  for (const auto& tc : case_matrix()) {
    const Instance inst = instance(tc);
    const OmegaBounds w = omega_bounds(inst.ops);
    EXPECT_EQ(w.feti_dp.has_value(), inst.ops.dim_lambda() > 0) << tc.name();
    if (!w.feti_dp) continue;
    EXPECT_LE(std::abs(w.bddc - *w.feti_dp), 1e-10 * w.bddc) << tc.name();
    EXPECT_GE(w.bddc, 1.0 - 1e-12);
  }
}

TEST(CompareSpectra, Examples) {
  const SpectraComparison empty = compare_spectra(Vec{1, 1}, Vec{});
  EXPECT_TRUE(empty.pass());
  EXPECT_EQ(empty.mult_one_bddc, 2u);

  const SpectraComparison same = compare_spectra(Vec{1, 1, 2, 5}, Vec{1, 2, 5 * (1 + 1e-10)});
  EXPECT_TRUE(same.pass());
  EXPECT_EQ(same.remaining_bddc, 2u);

  const SpectraComparison order = compare_spectra(Vec{2}, Vec{1, 2});
  EXPECT_TRUE(order.spectra_match);
  EXPECT_FALSE(order.mult_order);

  const SpectraComparison count = compare_spectra(Vec{1, 2, 3}, Vec{2});
  EXPECT_FALSE(count.spectra_match);

  const SpectraComparison values = compare_spectra(Vec{2, 3}, Vec{2, 3.001});
  EXPECT_FALSE(values.spectra_match);
  EXPECT_NEAR(values.max_rel_diff, 0.001 / 3.001, 1e-12);
}

TEST(ConditionNumber, Examples) {
  EXPECT_EQ(condition_number(Vec{1, 1, 1}), 1.0);
  EXPECT_EQ(condition_number(Vec{1, 2, 4}), 4.0);
  EXPECT_FALSE(condition_number(Vec{}).has_value());
  EXPECT_THROW(condition_number(Vec{0.0, 1.0}), InvalidOperator);
  EXPECT_THROW(condition_number(Vec{-1.0, 1.0}), InvalidOperator);
}

TEST(ConditionNumber, EqualsLargestEigenvalue) {
  for (const auto& tc : case_matrix()) {
    const SpectralReport r = report(instance(tc));
    for (const auto* e : {&r.eig_bddc, &r.eig_feti}) {
      if (e->empty() || e->front() < 1.0 - 1e-10 || e->front() > 1.0 + 1e-8) continue;
      const double kappa = *condition_number(*e);
      EXPECT_LE(std::abs(kappa - e->back()), 1e-8 * e->back()) << tc.name();
    }
  }
}

TEST(ConditionNumber, NonincreasingWhenEdgesAdded) {
  for (const auto& tc : case_matrix()) {
    if (tc.coarse != CoarseKind::corners) continue;
    auto edges = tc;
    edges.coarse = CoarseKind::corners_edges;
    const double k_corners = *report(instance(tc)).kappa_bddc;
    const double k_edges = *report(instance(edges)).kappa_bddc;
    EXPECT_LE(k_edges, k_corners * (1.0 + 1e-10)) << tc.name();
  }
}

TEST(ConditionNumber, EdgeAveragesHelpWithJumps) {
  const double corners = *report(instance(3, 3, 4, CoarseKind::corners, ScalingKind::stiffness, 1000.0)).kappa_bddc;
  const double edges = *report(instance(3, 3, 4, CoarseKind::corners_edges, ScalingKind::stiffness, 1000.0)).kappa_bddc;
  EXPECT_LT(edges, corners);
}

TEST(Multiplicity, BddcCanHaveMoreUnitEigenvalues) {
  // small instances where BDDC has an eigenvalue 1 that FETI-DP lacks
  std::vector<std::string> found;
  for (int m : {2, 3})
    for (auto [nx, ny] : {std::array{2, 2}, {3, 2}})
      for (ScalingKind s : {ScalingKind::multiplicity, ScalingKind::stiffness}) {
        const ddlab::test::Case tc{nx, ny, m, s, 1.0, CoarseKind::corners};
        const SpectralReport r = report(instance(tc));
        if (r.comparison.mult_one_bddc > r.comparison.mult_one_feti) found.push_back(tc.name());
        EXPECT_TRUE(r.comparison.mult_order) << tc.name();
      }
  EXPECT_FALSE(found.empty());
  const SpectralReport r = report(instance(2, 2, 2));
  EXPECT_EQ(r.comparison.mult_one_bddc, 3u);
  EXPECT_EQ(r.comparison.mult_one_feti, 2u);
}
