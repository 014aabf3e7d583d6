#include "ddlab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ddlab {

Weights build_weights(const std::vector<SchurLocal>& locals, const InterfaceLayout& layout,
                      ScalingKind kind) {
  Weights w;
  w.kind = kind;
  w.values.assign(layout.dim_w(), 0.0);

  Vec diag(layout.dim_w(), 0.0);
  if (kind == ScalingKind::stiffness) {
    for (const SchurLocal& l : locals) {
      const std::size_t o = layout.offsets.at(l.subdomain);
      for (std::size_t a = 0; a < l.stiffness_diagonal.size(); ++a) diag[o + a] = l.stiffness_diagonal[a];
    }
  }

  for (const Clique& c : layout.cliques) {
    if (kind == ScalingKind::multiplicity) {
      for (std::size_t p : c.members) w.values[p] = 1.0 / static_cast<double>(c.members.size());
      continue;
    }
    double sum = 0.0;
    for (std::size_t p : c.members) sum += diag[p];
    if (!(sum > 0.0)) {
      std::ostringstream os;
      os << "stiffness weights: zero diagonal sum at node " << c.node;
      throw std::domain_error(os.str());
    }
    for (std::size_t p : c.members) w.values[p] = diag[p] / sum;
  }
  return w;
}

SymMatrix build_stilde(const SymMatrix& s, const Matrix& rt) { return congruence(rt, s); }

SymMatrix build_shat(const SymMatrix& s_tilde, const Matrix& rh) { return congruence(rh, s_tilde); }

Matrix build_E(const InterfaceLayout& layout, const Weights& weights, const Subassembly& sub) {
  Matrix average(layout.dim_w_hat(), layout.dim_w());
  for (std::size_t c = 0; c < layout.cliques.size(); ++c)
    for (std::size_t p : layout.cliques[c].members) average(c, p) = weights.values[p];
  return average * sub.rt;
}

Matrix build_B(const InterfaceLayout& layout, const Subassembly& sub) {
  Matrix b(sub.dual_pairs.size(), sub.dim_w_tilde());
  for (std::size_t r = 0; r < sub.dual_pairs.size(); ++r) {
    const DualPair& pair = sub.dual_pairs[r];
    if (pair.clique_size > 2) {
      std::ostringstream os;
      os << "jump operator: dual clique of multiplicity " << pair.clique_size << " at node "
         << layout.dofs[pair.w_first].node << " (only pairs are supported)";
      throw UnsupportedConfiguration(os.str());
    }
    b(r, pair.first) = 1.0;
    b(r, pair.second) = -1.0;
  }
  return b;
}

Matrix build_BD(const Weights& weights, const InterfaceLayout& layout, const Subassembly& sub) {
  for (const EdgeDofs& e : sub.averaged_edges) {
    for (const auto* side : {&e.side_a, &e.side_b}) {
      const double w0 = weights.values[side->front()];
      for (std::size_t p : *side) {
        if (std::abs(weights.values[p] - w0) > 1e-14) {
          std::ostringstream os;
          os << "weighted jump operator: weights vary along averaged edge at node "
             << layout.dofs[p].node;
          throw UnsupportedConfiguration(os.str());
        }
      }
    }
  }

  Matrix bd(sub.dual_pairs.size(), sub.dim_w_tilde());
  for (std::size_t r = 0; r < sub.dual_pairs.size(); ++r) {
    const DualPair& pair = sub.dual_pairs[r];
    if (pair.clique_size > 2)
      throw UnsupportedConfiguration("weighted jump operator: dual clique larger than a pair");
    bd(r, pair.first) = weights.values[pair.w_second];
    bd(r, pair.second) = -weights.values[pair.w_first];
  }
  return bd;
}

OperatorSet build_operator_set(const BlockOperator& s, const std::vector<SchurLocal>& locals,
                               const InterfaceLayout& layout, const Subassembly& sub,
                               ScalingKind scaling) {
  OperatorSet ops;
  ops.s = s.s;
  ops.rt = sub.rt;
  ops.rh = sub.rh;
  ops.continuous_basis = sub.continuous_basis;
  ops.s_tilde = build_stilde(ops.s, ops.rt);
  ops.s_hat = build_shat(ops.s_tilde, ops.rh);
  ops.weights = build_weights(locals, layout, scaling);
  ops.e = build_E(layout, ops.weights, sub);
  ops.b = build_B(layout, sub);
  ops.bd = build_BD(ops.weights, layout, sub);
  return ops;
}

const AxiomResidual& AxiomReport::operator[](const std::string& name) const {
  for (const auto& r : residuals)
    if (r.name == name) return r;
  throw std::out_of_range("no axiom named " + name);
}

AxiomReport axiom_check(const OperatorSet& ops, double tol) {
  AxiomReport report;
  report.tolerance = tol;
  const std::size_t nt = ops.dim_w_tilde();
  const std::size_t nh = ops.dim_w_hat();
  const std::size_t nl = ops.dim_lambda();

  auto record = [&](std::string name, double residual) {
    report.residuals.push_back({std::move(name), residual, residual <= tol});
  };

  const Matrix p1 = ops.rh * ops.e;
  const Matrix p2 = ops.bd.transpose() * ops.b;

  record("E_Rh_identity", max_abs(ops.e * ops.rh - Matrix::identity(nh)));
  record("Rh_E_projection", max_abs(p1 * p1 - p1));

  double null_b = max_abs(ops.b * ops.rh);
  const std::size_t rank_b = numerical_rank(ops.b);
  // dim null(B) must equal dim W_hat, and B must have full row rank
  if (rank_b + nh != nt || rank_b != nl) null_b = std::max(null_b, 1.0);
  record("null_B_range_Rh", null_b);

  record("B_BDt_identity", max_abs(ops.b * ops.bd.transpose() - Matrix::identity(nl)));
  record("complementary_projections", max_abs(p1 + p2 - Matrix::identity(nt)));

  const SymMatrix one_shot = congruence(ops.continuous_basis, ops.s);
  const double scale = std::max(max_abs(ops.s_tilde.dense()), 1e-300);
  const double assembly = std::max(max_abs(ops.s_hat.dense() - congruence(ops.rh, ops.s_tilde).dense()),
                                   max_abs(ops.s_hat.dense() - one_shot.dense()));
  record("S_hat_assembly", assembly / scale);

  report.pass = std::all_of(report.residuals.begin(), report.residuals.end(),
                            [](const AxiomResidual& r) { return r.pass; });
  return report;
}

} // namespace ddlab
