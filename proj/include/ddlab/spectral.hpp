#pragma once

/** @file spectral.hpp
    @brief Spectra of the preconditioned BDDC and FETI-DP operators and the
           bounds and comparisons that relate them.

    P_BDDC = (E S_tilde^{-1} E^T)(Rh^T S_tilde Rh) on W_hat and
    P_FETI-DP = (B_D S_tilde B_D^T)(B S_tilde^{-1} B^T) on the multiplier space.
    Both are a semidefinite matrix times a definite one, so their eigenvalues
    come from gen_eig_spd. The matrices are assembled column by column from the
    matrix-free applications.
*/

#include "ddlab/krylov.hpp"
#include "ddlab/linalg.hpp"
#include "ddlab/operators.hpp"
#include "ddlab/preconditioners.hpp"

#include <optional>
#include <stdexcept>

namespace ddlab {

class InvalidOperator : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Column j is apply(e_j).
Matrix assemble_columns(const LinearOperator& apply, std::size_t n);

struct PreconditionedOperators {
  SymMatrix m_bddc;
  SymMatrix s_hat;
  SymMatrix m_feti;
  SymMatrix f;
  /// max |X - X^T| of the raw column assemblies, before symmetrization
  double asymmetry_m_bddc = 0.0;
  double asymmetry_m_feti = 0.0;
  double asymmetry_f = 0.0;
};

PreconditionedOperators assemble_preconditioned_ops(const OperatorSet& ops,
                                                    const BddcPreconditioner& bddc,
                                                    const FetiDpSystem& feti);

Vec spectrum_bddc(const SymMatrix& m_bddc, const SymMatrix& s_hat);
Vec spectrum_feti(const SymMatrix& m_feti, const SymMatrix& f);

struct OmegaBounds {
  double bddc = 0.0;                ///< ||Rh E||^2 in the S_tilde norm
  std::optional<double> feti_dp;    ///< ||B_D^T B||^2 in the S_tilde norm; absent when Lambda = {0}
};

OmegaBounds omega_bounds(const OperatorSet& ops);

std::size_t multiplicity_of_one(const Vec& eigenvalues, double one_tol);

struct SpectraComparison {
  double one_tol = 1e-8;
  double rel_tol = 1e-8;
  std::size_t mult_one_bddc = 0;
  std::size_t mult_one_feti = 0;
  std::size_t remaining_bddc = 0;
  std::size_t remaining_feti = 0;
  double max_rel_diff = 0.0;
  bool spectra_match = false; ///< equal counts and pairwise agreement off the 1-band
  bool mult_order = false;    ///< mult_one_feti <= mult_one_bddc

  bool pass() const { return spectra_match && mult_order; }
};

SpectraComparison compare_spectra(const Vec& eigs_bddc, const Vec& eigs_feti,
                                  double one_tol = 1e-8, double rel_tol = 1e-8);

/// lambda_max / lambda_min of an ascending list. Throws InvalidOperator when
/// lambda_min <= 0; an empty list gives nullopt.
std::optional<double> condition_number(const Vec& ascending);

struct SpectralTolerances {
  double bound = 1e-10;       ///< lambda_min >= 1 - bound, lambda_max <= omega (1 + bound)
  double omega_equal = 1e-10; ///< relative
  double one_band = 1e-8;
  double spectra_rel = 1e-8;
  double operator_equal = 1e-12; ///< max-abs, P-FETI-DP vs BDDC
};

struct TheoremFlags {
  bool thm1_operator_equal = false;
  bool thm2_lower = false;
  bool thm2_upper_bddc = false;
  bool thm2_upper_feti = false;
  bool thm2_omega_equal = false;
  bool thm3_spectra_match = false;
  bool thm3_mult_order = false;

  bool all() const {
    return thm1_operator_equal && thm2_lower && thm2_upper_bddc && thm2_upper_feti &&
           thm2_omega_equal && thm3_spectra_match && thm3_mult_order;
  }
};

struct SpectralReport {
  SpectralTolerances tolerances;
  Vec eig_bddc;
  Vec eig_feti;
  std::optional<double> kappa_bddc;
  std::optional<double> kappa_feti;
  OmegaBounds omega;
  SpectraComparison comparison;
  double pfetidp_bddc_max_diff = 0.0;
  double max_asymmetry = 0.0;
  TheoremFlags flags;
};

SpectralReport build_spectral_report(const OperatorSet& ops, const BddcPreconditioner& bddc,
                                     const FetiDpSystem& feti,
                                     const SpectralTolerances& tolerances = {});

} // namespace ddlab
