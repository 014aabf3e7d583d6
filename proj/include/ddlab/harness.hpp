#pragma once

/** @file harness.hpp
    @brief Randomized checks of the abstract eigenvalue results, independent of
           any discretization.

    For A symmetric positive definite and L T = I, every eigenvalue of
    (L A^{-1} L^T)(T^T A T) lies in [1, ||T L||_A^2]. For two such pairs with
    T1 L1 + T2 L2 = I, the operators (L1 A^{-1} L1^T)(T1^T A T1) and
    (T2^T A T2)(L2 A^{-1} L2^T) share every eigenvalue other than 1, with equal
    multiplicities.
*/

#include "ddlab/linalg.hpp"
#include "ddlab/operators.hpp"

#include <cstdint>
#include <random>

namespace ddlab {

using Rng = std::mt19937_64;

/// Q diag(d) Q^T with Q from the sign-fixed QR of a Gaussian matrix and d
/// log-spaced on [1, cond_target].
SymMatrix random_spd(std::size_t n, double cond_target, Rng& rng);

/// Gaussian matrix with independent standard normal entries.
Matrix random_gaussian(std::size_t rows, std::size_t cols, Rng& rng);

/// Orthonormal columns from the sign-fixed QR of a Gaussian matrix.
Matrix random_orthonormal(std::size_t rows, std::size_t cols, Rng& rng);

struct LtPair {
  Matrix l; ///< k x n
  Matrix t; ///< n x k
};

/// T with orthonormal columns, L = (L0 T)^{-1} L0 with L0 = T^T + G / sqrt(n),
/// G Gaussian. Resamples L0 if L0 T is singular.
LtPair make_LT(std::size_t n, std::size_t k, Rng& rng);

struct AbstractInstance {
  SymMatrix a;
  Matrix l;
  Matrix t;
  std::uint64_t seed = 0;
};

struct Lemma1Verdict {
  double lt_residual = 0.0; ///< max |L T - I|
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double bound = 0.0;       ///< ||T L||_A^2
  bool hypothesis_ok = false;
  bool lower_ok = false;
  bool upper_ok = false;

  bool pass() const { return hypothesis_ok && lower_ok && upper_ok; }
  /// lambda_max / bound, how close the upper bound is to tight
  double saturation() const { return bound > 0.0 ? lambda_max / bound : 0.0; }
};

struct LemmaTolerances {
  double lt = 1e-12;            ///< |L T - I|
  double complementary = 1e-11; ///< |T1 L1 + T2 L2 - I|
  double bound = 1e-10;
  double one_band = 1e-8;
  double spectra_rel = 1e-8;
};

/// Eigenvalues of (L A^{-1} L^T)(T^T A T).
Vec lemma_spectrum(const SymMatrix& a, const Matrix& l, const Matrix& t);

Lemma1Verdict lemma1_check(const AbstractInstance& inst, const LemmaTolerances& tol = {});

struct ComplementaryPair {
  Matrix l1, t1; ///< k1 columns
  Matrix l2, t2; ///< n - k1 columns
};

/// (L1, T1) from make_LT; T2 an orthonormal basis of range(I - T1 L1) from
/// pivoted QR, L2 = T2^T (I - T1 L1). Resamples if the rank of I - T1 L1 is
/// not n - k.
ComplementaryPair make_complementary(std::size_t n, std::size_t k, Rng& rng);

struct Lemma2Verdict {
  double hypothesis_residual = 0.0; ///< max of |L_i T_i - I| and |T1 L1 + T2 L2 - I|
  Vec spectrum_1;                   ///< (L1 A^{-1} L1^T)(T1^T A T1)
  Vec spectrum_2;                   ///< (T2^T A T2)(L2 A^{-1} L2^T)
  std::size_t mult_one_1 = 0;
  std::size_t mult_one_2 = 0;
  double max_rel_diff = 0.0;
  bool hypothesis_ok = false;
  bool spectra_match = false;

  bool pass() const { return hypothesis_ok && spectra_match; }
};

Lemma2Verdict lemma2_check(const ComplementaryPair& pair, const SymMatrix& a,
                           const LemmaTolerances& tol = {});

struct HarnessOptions {
  std::size_t instances = 200;
  std::size_t n_max = 30;
  double cond_max = 1e6;
  std::uint64_t seed = 7;
  /// Halve the first row of L (and of L1) after construction.
  bool inject_fault = false;
  LemmaTolerances tolerances;
};

struct HarnessSummary {
  std::size_t lemma1_run = 0;
  std::size_t lemma1_pass = 0;
  std::size_t lemma2_run = 0;
  std::size_t lemma2_pass = 0;
  double worst_lower_margin = 0.0;  ///< min over instances of lambda_min - 1
  double worst_upper_margin = 0.0;  ///< max over instances of lambda_max / bound - 1
  double max_saturation = 0.0;
  double worst_hypothesis = 0.0;
  double worst_spectra_rel = 0.0;

  bool pass() const { return lemma1_pass == lemma1_run && lemma2_pass == lemma2_run; }
};

HarnessSummary run_harness(const HarnessOptions& options);

struct ConcreteLemmaCheck {
  Lemma1Verdict bddc;    ///< L = E, T = Rh
  Lemma1Verdict feti_dp; ///< L = B, T = B_D^T
  Lemma2Verdict pair;
};

/// Feeds the substructuring operators into the abstract checks with A = S_tilde.
ConcreteLemmaCheck concrete_lemma_check(const OperatorSet& ops, const LemmaTolerances& tol = {});

} // namespace ddlab
