#pragma once

/** @file spaces.hpp
    @brief Explicit bases for the nested spaces W_hat in W_tilde in W.

    W is the product of the substructure interface spaces, ordered substructure
    by substructure (the same order as block_S). W_hat holds one value per free
    interface node. W_tilde sits in between: only the coarse degrees of freedom
    (corner values, optionally edge averages) are shared across substructures.

    W_tilde is represented by coordinates. Rt maps W_tilde coordinates to W,
    Rh maps W_hat coordinates (interface nodes) to W_tilde coordinates, and
    Rt * Rh is the continuous embedding of W_hat into W.
*/

#include "ddlab/linalg.hpp"
#include "ddlab/model_problem.hpp"

#include <cstddef>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddlab {

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

struct WDof {
  std::size_t subdomain = 0;
  int node = 0;
};

/// All W dofs that sit on one interface node, ordered by subdomain.
struct Clique {
  int node = 0;
  std::vector<std::size_t> members;
};

struct InterfaceLayout {
  std::vector<WDof> dofs;
  std::vector<std::size_t> offsets; ///< W block of substructure i is [offsets[i], offsets[i+1])
  std::vector<Clique> cliques;      ///< ascending node id; clique index == W_hat coordinate
  std::vector<std::size_t> clique_of_dof;
  std::map<int, std::size_t> clique_of_node;

  std::size_t dim_w() const { return dofs.size(); }
  std::size_t dim_w_hat() const { return cliques.size(); }
};

InterfaceLayout build_layout(const Decomposition& decomp);

enum class CoarseKind { corners, corners_edges };

/// Free interface nodes of multiplicity 2 shared by one pair of substructures.
struct Edge {
  std::size_t sub_a = 0; ///< sub_a < sub_b
  std::size_t sub_b = 0;
  std::vector<std::size_t> cliques; ///< ascending node id
  bool averaged = false;
};

struct CoarseSpec {
  CoarseKind kind = CoarseKind::corners;
  std::vector<std::size_t> corners; ///< clique indices
  std::vector<Edge> edges;

  std::size_t averaged_edge_count() const;
  bool empty() const { return corners.empty() && averaged_edge_count() == 0; }
};

/// Thrown when two or more substructures would be coupled by no coarse
/// degree of freedom at all.
class EmptyCoarseSpace : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Corners are the nodes of multiplicity >= 3; every pair of substructures
/// sharing multiplicity-2 nodes gives one edge, averaged for corners_edges.
CoarseSpec select_coarse(const InterfaceLayout& layout, const Decomposition& decomp,
                         CoarseKind kind);

enum class CoordKind { corner, dual, edge_average, edge_fluctuation };

struct CoordInfo {
  CoordKind kind = CoordKind::dual;
  std::size_t clique = npos;    ///< corner and dual coordinates
  std::size_t edge = npos;      ///< edge coordinates
  std::size_t subdomain = npos; ///< npos for shared coordinates
  std::size_t w_dof = npos;     ///< dual coordinates
  std::size_t fluctuation = npos;

  std::string describe(const InterfaceLayout& layout, const CoarseSpec& coarse) const;
};

/// Two W_tilde coordinates that must agree for continuity. For plain dual
/// nodes w_first / w_second are the two W dofs of the clique; for edge
/// fluctuations they are the W dofs of the matching node on either side.
struct DualPair {
  std::size_t first = 0;
  std::size_t second = 0;
  std::size_t w_first = 0;
  std::size_t w_second = 0;
  std::size_t edge = npos;
  std::size_t clique_size = 2;
};

/// W dofs of an averaged edge, one list per side, in edge node order.
struct EdgeDofs {
  std::size_t edge = npos;
  std::vector<std::size_t> side_a;
  std::vector<std::size_t> side_b;
};

struct Subassembly {
  Matrix rt;      ///< dim W x dim W_tilde
  Matrix rh;      ///< dim W_tilde x dim W_hat
  Matrix decoder; ///< dim W_tilde x dim W, decoder * rt == I
  Matrix continuous_basis; ///< dim W x dim W_hat, column c is the indicator of clique c
  std::vector<CoordInfo> coords;
  std::vector<DualPair> dual_pairs;
  std::vector<EdgeDofs> averaged_edges;

  std::size_t dim_w() const { return rt.rows(); }
  std::size_t dim_w_tilde() const { return rt.cols(); }
  std::size_t dim_w_hat() const { return rh.cols(); }
};

/// Throws std::logic_error if Rt is rank deficient or Rt * Rh is not the
/// continuous embedding.
Subassembly build_subassembly(const InterfaceLayout& layout, const CoarseSpec& coarse);

/// Cholesky of S_tilde. On failure rethrows NotPositiveDefinite naming the
/// W_tilde coordinate at the failing pivot.
CholFactor check_wtilde_spd(const SymMatrix& s_tilde, const Subassembly& sub,
                            const InterfaceLayout& layout, const CoarseSpec& coarse);

} // namespace ddlab
