#pragma once

/** @file preconditioners.hpp
    @brief BDDC, FETI-DP and P-FETI-DP as matrix-free applications.

    BddcPreconditioner and FetiDpSystem each factor S_tilde themselves so the
    P-FETI-DP application (FETI-DP primal recovery with zero multipliers) shares
    no state with BDDC.
*/

#include "ddlab/linalg.hpp"
#include "ddlab/operators.hpp"

#include <span>
#include <utility>

namespace ddlab {

class BddcPreconditioner {
public:
  explicit BddcPreconditioner(const OperatorSet& ops);

  /// E S_tilde^{-1} E^T r.
  Vec apply(std::span<const double> r) const;
  /// The W_tilde solution w of S_tilde w = E^T r.
  Vec coarse_solution(std::span<const double> r) const;

  std::size_t size() const { return e_.rows(); }

private:
  Matrix e_;
  CholFactor s_tilde_;
};

class FetiDpSystem {
public:
  /// Factors S_tilde and the dense dual operator F; both must be positive definite.
  explicit FetiDpSystem(const OperatorSet& ops);

  std::size_t dim_lambda() const { return b_.rows(); }
  std::size_t dim_primal() const { return e_.rows(); }

  /// B S_tilde^{-1} B^T lambda.
  Vec apply_F(std::span<const double> lambda) const;
  /// B S_tilde^{-1} E^T f.
  Vec rhs(std::span<const double> f) const;
  /// B_D S_tilde B_D^T mu.
  Vec apply_M(std::span<const double> mu) const;
  /// S_tilde^{-1} (E^T f - B^T lambda), before projection.
  Vec unprojected_primal(std::span<const double> lambda, std::span<const double> f) const;
  /// E S_tilde^{-1} (E^T f - B^T lambda).
  Vec primal_recover(std::span<const double> lambda, std::span<const double> f) const;
  /// primal_recover(0, r).
  Vec pfetidp_apply(std::span<const double> r) const;
  /// Exact multipliers from the dense factor of F.
  Vec solve_dual(std::span<const double> f) const;

  /// Block elimination of  S_tilde w + B^T lambda = E^T f,  B w = 0.
  std::pair<Vec, Vec> saddle_solve(std::span<const double> f) const;

  const SymMatrix& dense_F() const { return f_; }
  const SymMatrix& s_tilde() const { return s_tilde_; }
  const Matrix& b() const { return b_; }
  const Matrix& e() const { return e_; }

private:
  Matrix e_;
  Matrix b_;
  Matrix bd_;
  SymMatrix s_tilde_;
  CholFactor s_tilde_factor_;
  SymMatrix f_;
  CholFactor f_factor_;
};

} // namespace ddlab
