#include "ddlab/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace ddlab {

Matrix assemble_columns(const LinearOperator& apply, std::size_t n) {
  Matrix out;
  for (std::size_t j = 0; j < n; ++j) {
    Vec e(n, 0.0);
    e[j] = 1.0;
    const Vec col = apply(e);
    if (j == 0) out = Matrix(col.size(), n);
    out.set_column(j, col);
  }
  return out;
}

namespace {

double asymmetry(const Matrix& a) { return max_abs(a - a.transpose()); }

} // namespace

PreconditionedOperators assemble_preconditioned_ops(const OperatorSet& ops,
                                                    const BddcPreconditioner& bddc,
                                                    const FetiDpSystem& feti) {
  PreconditionedOperators out;
  const std::size_t nh = ops.dim_w_hat();
  const std::size_t nl = feti.dim_lambda();

  const Matrix m_bddc = assemble_columns([&](std::span<const double> r) { return bddc.apply(r); }, nh);
  const Matrix m_feti = assemble_columns([&](std::span<const double> mu) { return feti.apply_M(mu); }, nl);
  const Matrix f = assemble_columns([&](std::span<const double> l) { return feti.apply_F(l); }, nl);

  out.asymmetry_m_bddc = asymmetry(m_bddc);
  out.asymmetry_m_feti = asymmetry(m_feti);
  out.asymmetry_f = asymmetry(f);
  out.m_bddc = nh ? SymMatrix::symmetrize(m_bddc) : SymMatrix(0);
  out.m_feti = nl ? SymMatrix::symmetrize(m_feti) : SymMatrix(0);
  out.f = nl ? SymMatrix::symmetrize(f) : SymMatrix(0);
  out.s_hat = ops.s_hat;
  return out;
}

Vec spectrum_bddc(const SymMatrix& m_bddc, const SymMatrix& s_hat) {
  return gen_eig_spd(m_bddc, s_hat);
}

Vec spectrum_feti(const SymMatrix& m_feti, const SymMatrix& f) { return gen_eig_spd(m_feti, f); }

OmegaBounds omega_bounds(const OperatorSet& ops) {
  OmegaBounds out;
  out.bddc = energy_op_norm_sq(ops.rh * ops.e, ops.s_tilde);
  if (ops.dim_lambda() > 0) out.feti_dp = energy_op_norm_sq(ops.bd.transpose() * ops.b, ops.s_tilde);
  return out;
}

std::size_t multiplicity_of_one(const Vec& eigenvalues, double one_tol) {
  return static_cast<std::size_t>(std::count_if(eigenvalues.begin(), eigenvalues.end(), [&](double l) {
    return std::abs(l - 1.0) <= one_tol;
  }));
}

SpectraComparison compare_spectra(const Vec& eigs_bddc, const Vec& eigs_feti, double one_tol,
                                  double rel_tol) {
  SpectraComparison out;
  out.one_tol = one_tol;
  out.rel_tol = rel_tol;
  auto strip = [&](const Vec& in) {
    Vec kept;
    for (double l : in)
      if (std::abs(l - 1.0) > one_tol) kept.push_back(l);
    std::sort(kept.begin(), kept.end());
    return kept;
  };
  const Vec a = strip(eigs_bddc);
  const Vec b = strip(eigs_feti);
  out.mult_one_bddc = multiplicity_of_one(eigs_bddc, one_tol);
  out.mult_one_feti = multiplicity_of_one(eigs_feti, one_tol);
  out.remaining_bddc = a.size();
  out.remaining_feti = b.size();
  out.mult_order = out.mult_one_feti <= out.mult_one_bddc;
  if (a.size() != b.size()) {
    out.max_rel_diff = INFINITY;
    return out;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max(std::abs(a[i]), std::abs(b[i]));
    out.max_rel_diff = std::max(out.max_rel_diff, std::abs(a[i] - b[i]) / scale);
  }
  out.spectra_match = out.max_rel_diff <= rel_tol;
  return out;
}

std::optional<double> condition_number(const Vec& ascending) {
  if (ascending.empty()) return std::nullopt;
  if (!(ascending.front() > 0.0))
    throw InvalidOperator("condition number: smallest eigenvalue is not positive");
  return ascending.back() / ascending.front();
}

SpectralReport build_spectral_report(const OperatorSet& ops, const BddcPreconditioner& bddc,
                                     const FetiDpSystem& feti, const SpectralTolerances& tol) {
  SpectralReport rep;
  rep.tolerances = tol;

  const PreconditionedOperators pre = assemble_preconditioned_ops(ops, bddc, feti);
  rep.max_asymmetry = std::max({pre.asymmetry_m_bddc, pre.asymmetry_m_feti, pre.asymmetry_f});
  rep.eig_bddc = spectrum_bddc(pre.m_bddc, pre.s_hat);
  rep.eig_feti = spectrum_feti(pre.m_feti, pre.f);
  rep.kappa_bddc = condition_number(rep.eig_bddc);
  rep.kappa_feti = condition_number(rep.eig_feti);
  rep.omega = omega_bounds(ops);
  rep.comparison = compare_spectra(rep.eig_bddc, rep.eig_feti, tol.one_band, tol.spectra_rel);

  const std::size_t nh = ops.dim_w_hat();
  const Matrix m_pfetidp =
      assemble_columns([&](std::span<const double> r) { return feti.pfetidp_apply(r); }, nh);
  const Matrix m_bddc =
      assemble_columns([&](std::span<const double> r) { return bddc.apply(r); }, nh);
  rep.pfetidp_bddc_max_diff = nh ? max_abs(m_pfetidp - m_bddc) : 0.0;

  auto min_ok = [&](const Vec& e) { return e.empty() || e.front() >= 1.0 - tol.bound; };
  TheoremFlags& f = rep.flags;
  f.thm1_operator_equal = rep.pfetidp_bddc_max_diff <= tol.operator_equal;
  f.thm2_lower = min_ok(rep.eig_bddc) && min_ok(rep.eig_feti);
  f.thm2_upper_bddc = rep.eig_bddc.empty() || rep.eig_bddc.back() <= rep.omega.bddc * (1.0 + tol.bound);
  f.thm2_upper_feti = rep.eig_feti.empty() ||
                      (rep.omega.feti_dp && rep.eig_feti.back() <= *rep.omega.feti_dp * (1.0 + tol.bound));
  f.thm2_omega_equal = !rep.omega.feti_dp || std::abs(rep.omega.bddc - *rep.omega.feti_dp) <=
                                                 tol.omega_equal * rep.omega.bddc;
  f.thm3_spectra_match = rep.comparison.spectra_match;
  f.thm3_mult_order = rep.comparison.mult_order;
  return rep;
}

} // namespace ddlab
