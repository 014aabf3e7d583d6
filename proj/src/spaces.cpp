#include "ddlab/spaces.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

namespace ddlab {

InterfaceLayout build_layout(const Decomposition& decomp) {
  InterfaceLayout layout;
  layout.offsets.push_back(0);
  std::map<int, std::vector<std::size_t>> members_of_node;
  for (const Substructure& s : decomp.substructures) {
    for (std::size_t local : s.interface) {
      const int node = s.nodes[local];
      members_of_node[node].push_back(layout.dofs.size());
      layout.dofs.push_back({s.index, node});
    }
    layout.offsets.push_back(layout.dofs.size());
  }
  layout.clique_of_dof.assign(layout.dofs.size(), npos);
  for (auto& [node, members] : members_of_node) {
    const std::size_t c = layout.cliques.size();
    for (std::size_t p : members) layout.clique_of_dof[p] = c;
    layout.clique_of_node[node] = c;
    layout.cliques.push_back({node, std::move(members)});
  }
  return layout;
}

std::size_t CoarseSpec::averaged_edge_count() const {
  return static_cast<std::size_t>(
      std::count_if(edges.begin(), edges.end(), [](const Edge& e) { return e.averaged; }));
}

CoarseSpec select_coarse(const InterfaceLayout& layout, const Decomposition& decomp,
                         CoarseKind kind) {
  CoarseSpec coarse;
  coarse.kind = kind;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> by_pair;
  for (std::size_t c = 0; c < layout.cliques.size(); ++c) {
    const auto& members = layout.cliques[c].members;
    if (members.size() >= 3) {
      coarse.corners.push_back(c);
    } else if (members.size() == 2) {
      by_pair[{layout.dofs[members[0]].subdomain, layout.dofs[members[1]].subdomain}].push_back(c);
    }
  }
  for (auto& [pair, cliques] : by_pair)
    coarse.edges.push_back({pair.first, pair.second, std::move(cliques),
                            kind == CoarseKind::corners_edges});
  std::sort(coarse.edges.begin(), coarse.edges.end(),
            [](const Edge& x, const Edge& y) { return x.cliques.front() < y.cliques.front(); });

  if (decomp.substructures.size() >= 2 && layout.dim_w() > 0 && coarse.empty()) {
    std::ostringstream os;
    os << "no coarse degrees of freedom: " << coarse.corners.size() << " corners, "
       << coarse.edges.size() << " edges";
    if (kind == CoarseKind::corners && !coarse.edges.empty()) os << " (edge averages not selected)";
    throw EmptyCoarseSpace(os.str());
  }
  return coarse;
}

std::string CoordInfo::describe(const InterfaceLayout& layout, const CoarseSpec& coarse) const {
  std::ostringstream os;
  switch (kind) {
  case CoordKind::corner:
    os << "corner at node " << layout.cliques[clique].node;
    break;
  case CoordKind::dual:
    os << "dual dof of substructure " << subdomain << " at node " << layout.cliques[clique].node;
    break;
  case CoordKind::edge_average:
    os << "average over edge " << coarse.edges[edge].sub_a << "-" << coarse.edges[edge].sub_b;
    break;
  case CoordKind::edge_fluctuation:
    os << "fluctuation " << fluctuation << " of substructure " << subdomain << " on edge "
       << coarse.edges[edge].sub_a << "-" << coarse.edges[edge].sub_b;
    break;
  }
  return os.str();
}

namespace {

using SparseColumn = std::vector<std::pair<std::size_t, double>>;

std::size_t member_on(const InterfaceLayout& layout, const Clique& c, std::size_t sub) {
  for (std::size_t p : c.members)
    if (layout.dofs[p].subdomain == sub) return p;
  throw std::logic_error("clique has no member on the requested substructure");
}

} // namespace

Subassembly build_subassembly(const InterfaceLayout& layout, const CoarseSpec& coarse) {
  const std::size_t nw = layout.dim_w();
  const std::size_t nhat = layout.dim_w_hat();

  std::vector<bool> is_coarse_clique(nhat, false);
  for (std::size_t c : coarse.corners) is_coarse_clique[c] = true;
  for (const Edge& e : coarse.edges)
    if (e.averaged)
      for (std::size_t c : e.cliques) is_coarse_clique[c] = true;

  Subassembly out;
  std::vector<SparseColumn> columns; // of Rt
  std::vector<SparseColumn> decoder_rows;
  auto push = [&](CoordInfo info, SparseColumn col, SparseColumn dec) {
    out.coords.push_back(info);
    columns.push_back(std::move(col));
    decoder_rows.push_back(std::move(dec));
    return out.coords.size() - 1;
  };

  for (std::size_t c : coarse.corners) {
    SparseColumn col;
    for (std::size_t p : layout.cliques[c].members) col.emplace_back(p, 1.0);
    CoordInfo info;
    info.kind = CoordKind::corner;
    info.clique = c;
    push(info, std::move(col), {{layout.cliques[c].members.front(), 1.0}});
  }

  for (std::size_t e = 0; e < coarse.edges.size(); ++e) {
    const Edge& edge = coarse.edges[e];
    if (!edge.averaged) continue;
    const double k = static_cast<double>(edge.cliques.size());
    SparseColumn col;
    SparseColumn dec;
    for (std::size_t c : edge.cliques) {
      for (std::size_t p : layout.cliques[c].members) col.emplace_back(p, 1.0);
      dec.emplace_back(member_on(layout, layout.cliques[c], edge.sub_a), 1.0 / k);
    }
    CoordInfo info;
    info.kind = CoordKind::edge_average;
    info.edge = e;
    push(info, std::move(col), std::move(dec));
  }

  for (std::size_t c = 0; c < nhat; ++c) {
    if (is_coarse_clique[c]) continue;
    const auto& members = layout.cliques[c].members;
    std::vector<std::size_t> coord_of_member;
    for (std::size_t p : members) {
      CoordInfo info;
      info.kind = CoordKind::dual;
      info.clique = c;
      info.subdomain = layout.dofs[p].subdomain;
      info.w_dof = p;
      coord_of_member.push_back(push(info, {{p, 1.0}}, {{p, 1.0}}));
    }
    for (std::size_t i = 0; i + 1 < members.size(); ++i) {
      DualPair pair;
      pair.first = coord_of_member[i];
      pair.second = coord_of_member[i + 1];
      pair.w_first = members[i];
      pair.w_second = members[i + 1];
      pair.clique_size = members.size();
      out.dual_pairs.push_back(pair);
    }
  }

  for (std::size_t e = 0; e < coarse.edges.size(); ++e) {
    const Edge& edge = coarse.edges[e];
    if (!edge.averaged || edge.cliques.size() < 2) continue;
    const std::size_t k = edge.cliques.size();
    std::vector<std::size_t> coords_a;
    EdgeDofs sides;
    sides.edge = e;
    for (std::size_t side : {edge.sub_a, edge.sub_b}) {
      std::vector<std::size_t> dofs;
      for (std::size_t c : edge.cliques) dofs.push_back(member_on(layout, layout.cliques[c], side));
      (side == edge.sub_a ? sides.side_a : sides.side_b) = dofs;
      for (std::size_t j = 0; j + 1 < k; ++j) {
        // node j moves by +1, the last node by -1, so the edge mean is unchanged
        SparseColumn col{{dofs[j], 1.0}, {dofs[k - 1], -1.0}};
        SparseColumn dec;
        for (std::size_t i = 0; i < k; ++i)
          dec.emplace_back(dofs[i], (i == j ? 1.0 : 0.0) - 1.0 / static_cast<double>(k));
        CoordInfo info;
        info.kind = CoordKind::edge_fluctuation;
        info.edge = e;
        info.subdomain = side;
        info.fluctuation = j;
        const std::size_t coord = push(info, std::move(col), std::move(dec));
        if (side == edge.sub_a) {
          coords_a.push_back(coord);
        } else {
          DualPair pair;
          pair.first = coords_a[j];
          pair.second = coord;
          pair.w_first = member_on(layout, layout.cliques[edge.cliques[j]], edge.sub_a);
          pair.w_second = dofs[j];
          pair.edge = e;
          out.dual_pairs.push_back(pair);
        }
      }
    }
    out.averaged_edges.push_back(std::move(sides));
  }

  const std::size_t ntilde = columns.size();
  out.rt = Matrix(nw, ntilde);
  out.decoder = Matrix(ntilde, nw);
  for (std::size_t j = 0; j < ntilde; ++j) {
    for (auto [p, v] : columns[j]) out.rt(p, j) += v;
    for (auto [p, v] : decoder_rows[j]) out.decoder(j, p) += v;
  }
  out.continuous_basis = Matrix(nw, nhat);
  for (std::size_t p = 0; p < nw; ++p) out.continuous_basis(p, layout.clique_of_dof[p]) = 1.0;
  out.rh = out.decoder * out.continuous_basis;

  try {
    (void)cholesky(gram(out.rt));
  } catch (const NotPositiveDefinite&) {
    throw std::logic_error("subassembly: Rt does not have full column rank");
  }
  if (max_abs(out.decoder * out.rt - Matrix::identity(ntilde)) > 1e-13)
    throw std::logic_error("subassembly: decoder is not a left inverse of Rt");
  if (max_abs(out.rt * out.rh - out.continuous_basis) > 1e-13)
    throw std::logic_error("subassembly: Rt * Rh is not the continuous embedding");
  return out;
}

CholFactor check_wtilde_spd(const SymMatrix& s_tilde, const Subassembly& sub,
                            const InterfaceLayout& layout, const CoarseSpec& coarse) {
  try {
    return cholesky(s_tilde);
  } catch (const NotPositiveDefinite& e) {
    throw NotPositiveDefinite(e.pivot(), e.pivot_value(),
                              "S_tilde singular at " +
                                  sub.coords.at(e.pivot()).describe(layout, coarse) +
                                  "; coarse space too small");
  }
}

} // namespace ddlab
