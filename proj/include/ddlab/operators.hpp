#pragma once

/** @file operators.hpp
    @brief S_tilde, S_hat, E, B, B_D on subassembled coordinates and the
           residual checks of the assumptions that tie them together.

    E maps W_tilde coordinates to W_hat coordinates; the projection on W_tilde
    is Rh * E. B has one row per dual pair with +1 / -1 entries, and B_D carries
    the averaging weights so that B B_D^T = I and B_D^T B + Rh E = I.
*/

#include "ddlab/linalg.hpp"
#include "ddlab/model_problem.hpp"
#include "ddlab/spaces.hpp"

#include <string>
#include <vector>

namespace ddlab {

enum class ScalingKind { multiplicity, stiffness };

struct Weights {
  ScalingKind kind = ScalingKind::multiplicity;
  Vec values; ///< one per W dof; sums to 1 over every clique
};

class UnsupportedConfiguration : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// multiplicity: 1 / clique size. stiffness: diag(K_i) at the dof divided by
/// the clique sum of the same diagonals.
Weights build_weights(const std::vector<SchurLocal>& locals, const InterfaceLayout& layout,
                      ScalingKind kind);

/// Rt^T S Rt.
SymMatrix build_stilde(const SymMatrix& s, const Matrix& rt);
/// Rh^T S_tilde Rh.
SymMatrix build_shat(const SymMatrix& s_tilde, const Matrix& rh);

/// Weighted nodal average of the W values decoded from W_tilde coordinates.
Matrix build_E(const InterfaceLayout& layout, const Weights& weights, const Subassembly& sub);

/// Throws UnsupportedConfiguration for dual cliques with more than two members.
Matrix build_B(const InterfaceLayout& layout, const Subassembly& sub);

/// Row for dual pair (p, q) with weights (w_p, w_q): +w_q at p, -w_p at q.
/// Averaged edges need one weight per side; otherwise UnsupportedConfiguration.
Matrix build_BD(const Weights& weights, const InterfaceLayout& layout, const Subassembly& sub);

struct OperatorSet {
  SymMatrix s;       ///< on W
  SymMatrix s_tilde; ///< on W_tilde coordinates
  SymMatrix s_hat;   ///< on W_hat coordinates
  Matrix rt;
  Matrix rh;
  Matrix continuous_basis;
  Matrix e;
  Matrix b;
  Matrix bd;
  Weights weights;

  std::size_t dim_w() const { return rt.rows(); }
  std::size_t dim_w_tilde() const { return rt.cols(); }
  std::size_t dim_w_hat() const { return rh.cols(); }
  std::size_t dim_lambda() const { return b.rows(); }
};

OperatorSet build_operator_set(const BlockOperator& s, const std::vector<SchurLocal>& locals,
                               const InterfaceLayout& layout, const Subassembly& sub,
                               ScalingKind scaling);

struct AxiomResidual {
  std::string name;
  double residual = 0.0;
  bool pass = false;
};

struct AxiomReport {
  double tolerance = 1e-12;
  std::vector<AxiomResidual> residuals;
  bool pass = false;

  const AxiomResidual& operator[](const std::string& name) const;
};

/// Max-abs residuals of
///   E Rh = I, (Rh E)^2 = Rh E, B Rh = 0 with rank B = dim W_tilde - dim W_hat,
///   B B_D^T = I, B_D^T B + Rh E = I, and S_hat = Rh^T S_tilde Rh,
/// the last one against the one-shot (Rt Rh)^T S (Rt Rh) and divided by
/// max|S_tilde| so that it does not depend on the coefficient scale.
AxiomReport axiom_check(const OperatorSet& ops, double tol = 1e-12);

} // namespace ddlab
