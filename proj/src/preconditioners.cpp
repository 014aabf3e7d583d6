#include "ddlab/preconditioners.hpp"

namespace ddlab {

BddcPreconditioner::BddcPreconditioner(const OperatorSet& ops)
    : e_(ops.e), s_tilde_(cholesky(ops.s_tilde)) {}

Vec BddcPreconditioner::coarse_solution(std::span<const double> r) const {
  return chol_solve(s_tilde_, multiply_transpose(e_, r));
}

Vec BddcPreconditioner::apply(std::span<const double> r) const {
  return multiply(e_, coarse_solution(r));
}

FetiDpSystem::FetiDpSystem(const OperatorSet& ops)
    : e_(ops.e), b_(ops.b), bd_(ops.bd), s_tilde_(ops.s_tilde),
      s_tilde_factor_(cholesky(ops.s_tilde)) {
  // F = B S_tilde^{-1} B^T, assembled once to verify it is positive definite
  const Matrix x = chol_solve(s_tilde_factor_, b_.transpose());
  f_ = SymMatrix::symmetrize(b_ * x);
  f_factor_ = cholesky(f_);
}

Vec FetiDpSystem::apply_F(std::span<const double> lambda) const {
  return multiply(b_, chol_solve(s_tilde_factor_, multiply_transpose(b_, lambda)));
}

Vec FetiDpSystem::rhs(std::span<const double> f) const {
  return multiply(b_, chol_solve(s_tilde_factor_, multiply_transpose(e_, f)));
}

Vec FetiDpSystem::apply_M(std::span<const double> mu) const {
  return multiply(bd_, multiply(s_tilde_, multiply_transpose(bd_, mu)));
}

Vec FetiDpSystem::unprojected_primal(std::span<const double> lambda,
                                     std::span<const double> f) const {
  return chol_solve(s_tilde_factor_,
                    subtract(multiply_transpose(e_, f), multiply_transpose(b_, lambda)));
}

Vec FetiDpSystem::primal_recover(std::span<const double> lambda, std::span<const double> f) const {
  return multiply(e_, unprojected_primal(lambda, f));
}

Vec FetiDpSystem::pfetidp_apply(std::span<const double> r) const {
  const Vec zero(dim_lambda(), 0.0);
  return primal_recover(zero, r);
}

Vec FetiDpSystem::solve_dual(std::span<const double> f) const { return chol_solve(f_factor_, rhs(f)); }

std::pair<Vec, Vec> FetiDpSystem::saddle_solve(std::span<const double> f) const {
  Vec lambda = solve_dual(f);
  Vec w = unprojected_primal(lambda, f);
  return {std::move(w), std::move(lambda)};
}

} // namespace ddlab
