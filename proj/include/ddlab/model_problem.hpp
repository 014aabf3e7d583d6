#pragma once

/** @file model_problem.hpp
    @brief Q1 Laplacian on a rectangle split into nx x ny equal substructures.

    Substructure (I, J) covers elements [I*m, (I+1)*m) x [J*m, (J+1)*m) of a
    uniform square grid. The whole outer boundary carries homogeneous Dirichlet
    conditions; those nodes are removed from every degree-of-freedom set. Free
    nodes shared by two or more substructures form the interface, the rest are
    interior to exactly one substructure.
*/

#include "ddlab/linalg.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace ddlab {

struct GridSpec {
  int nx = 1;
  int ny = 1;
  int m = 1;
  /// Coefficient per substructure, index I + nx * J. Empty means all ones.
  std::vector<double> rho;
  bool dirichlet = true;

  std::size_t substructure_count() const { return static_cast<std::size_t>(nx) * ny; }
  double coefficient(std::size_t sub) const { return rho.empty() ? 1.0 : rho[sub]; }

  /// Throws std::invalid_argument for nx, ny, m < 1, non-positive rho, a rho list
  /// of the wrong length, or dirichlet == false.
  void validate() const;
};

/// rho = ratio on substructures with I + J odd, 1 elsewhere.
std::vector<double> checkerboard(int nx, int ny, double ratio);

struct Substructure {
  std::size_t index = 0;
  /// Free (non-Dirichlet) global node ids, ascending. Local dof k is nodes[k].
  std::vector<int> nodes;
  std::vector<std::size_t> interior;  ///< local dofs with multiplicity 1
  std::vector<std::size_t> interface; ///< local dofs with multiplicity >= 2
  bool touches_dirichlet = false;
};

struct Decomposition {
  GridSpec spec;
  int nodes_x = 0; ///< nx * m + 1
  int nodes_y = 0;
  std::vector<std::array<double, 2>> coordinates;
  std::vector<int> multiplicity;
  std::vector<bool> dirichlet;
  std::vector<Substructure> substructures;

  std::size_t node_count() const { return coordinates.size(); }
  std::size_t free_dof_count() const;
  /// Global free nodes with multiplicity >= 2, ascending.
  std::vector<int> interface_nodes() const;
  bool no_free_dofs() const { return free_dof_count() == 0; }
};

Decomposition build_decomposition(const GridSpec& spec);

/// Exact stiffness of -div(grad u) on one square Q1 element, counterclockwise
/// local numbering starting at the lower-left corner.
const std::array<std::array<double, 4>, 4>& q1_element_stiffness();

struct SubdomainStiffness {
  SymMatrix k; ///< on the substructure's free nodes
  std::vector<std::size_t> interior;
  std::vector<std::size_t> interface;
};

SubdomainStiffness assemble_subdomain(const Decomposition& decomp, std::size_t sub);

struct SchurLocal {
  std::size_t subdomain = 0;
  /// Global node ids of the interface dofs, in the order used by s.
  std::vector<int> interface_nodes;
  SymMatrix s;
  /// diag(K_i) at the interface dofs, used for stiffness scaling.
  Vec stiffness_diagonal;
};

/// S = K_GG - K_GI K_II^{-1} K_IG. Throws NotPositiveDefinite if K_II is not.
SymMatrix schur_complement(const SymMatrix& k, const std::vector<std::size_t>& interior,
                           const std::vector<std::size_t>& interface);

SchurLocal schur_local(const Decomposition& decomp, std::size_t sub);

std::vector<SchurLocal> all_schur_locals(const Decomposition& decomp);

/// Block-diagonal S on W = W_1 x ... x W_N.
struct BlockOperator {
  SymMatrix s;
  std::vector<std::size_t> offsets; ///< size N+1, block i is [offsets[i], offsets[i+1])
};

BlockOperator block_S(const std::vector<SchurLocal>& locals);

} // namespace ddlab
