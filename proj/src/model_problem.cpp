#include "ddlab/model_problem.hpp"

#include <algorithm>
#include <stdexcept>

namespace ddlab {

void GridSpec::validate() const {
  if (nx < 1 || ny < 1) throw std::invalid_argument("GridSpec: nx and ny must be at least 1");
  if (m < 1) throw std::invalid_argument("GridSpec: m must be at least 1");
  if (!rho.empty() && rho.size() != substructure_count())
    throw std::invalid_argument("GridSpec: rho needs one entry per substructure");
  for (double r : rho)
    if (!(r > 0.0)) throw std::invalid_argument("GridSpec: rho must be positive");
  if (!dirichlet)
    throw std::invalid_argument("GridSpec: only a fully clamped outer boundary is supported");
}

std::vector<double> checkerboard(int nx, int ny, double ratio) {
  std::vector<double> rho(static_cast<std::size_t>(nx) * ny, 1.0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if ((i + j) % 2 == 1) rho[i + nx * j] = ratio;
  return rho;
}

std::size_t Decomposition::free_dof_count() const {
  return static_cast<std::size_t>(std::count(dirichlet.begin(), dirichlet.end(), false));
}

std::vector<int> Decomposition::interface_nodes() const {
  std::vector<int> out;
  for (std::size_t n = 0; n < node_count(); ++n)
    if (!dirichlet[n] && multiplicity[n] >= 2) out.push_back(static_cast<int>(n));
  return out;
}

Decomposition build_decomposition(const GridSpec& spec) {
  spec.validate();
  Decomposition d;
  d.spec = spec;
  d.nodes_x = spec.nx * spec.m + 1;
  d.nodes_y = spec.ny * spec.m + 1;
  const std::size_t nn = static_cast<std::size_t>(d.nodes_x) * d.nodes_y;
  d.coordinates.resize(nn);
  d.multiplicity.assign(nn, 0);
  d.dirichlet.assign(nn, false);

  const double h = 1.0 / spec.m;
  for (int j = 0; j < d.nodes_y; ++j) {
    for (int i = 0; i < d.nodes_x; ++i) {
      const std::size_t id = static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * d.nodes_x;
      d.coordinates[id] = {i * h, j * h};
      d.dirichlet[id] = i == 0 || j == 0 || i == d.nodes_x - 1 || j == d.nodes_y - 1;
    }
  }

  for (int sj = 0; sj < spec.ny; ++sj) {
    for (int si = 0; si < spec.nx; ++si) {
      for (int j = sj * spec.m; j <= (sj + 1) * spec.m; ++j)
        for (int i = si * spec.m; i <= (si + 1) * spec.m; ++i) ++d.multiplicity[i + j * d.nodes_x];
    }
  }

  for (int sj = 0; sj < spec.ny; ++sj) {
    for (int si = 0; si < spec.nx; ++si) {
      Substructure sub;
      sub.index = static_cast<std::size_t>(si + spec.nx * sj);
      for (int j = sj * spec.m; j <= (sj + 1) * spec.m; ++j) {
        for (int i = si * spec.m; i <= (si + 1) * spec.m; ++i) {
          const int id = i + j * d.nodes_x;
          if (d.dirichlet[id]) {
            sub.touches_dirichlet = true;
            continue;
          }
          const std::size_t local = sub.nodes.size();
          sub.nodes.push_back(id);
          (d.multiplicity[id] >= 2 ? sub.interface : sub.interior).push_back(local);
        }
      }
      d.substructures.push_back(std::move(sub));
    }
  }
  return d;
}

const std::array<std::array<double, 4>, 4>& q1_element_stiffness() {
  static const std::array<std::array<double, 4>, 4> k = {{
      {4.0 / 6.0, -1.0 / 6.0, -2.0 / 6.0, -1.0 / 6.0},
      {-1.0 / 6.0, 4.0 / 6.0, -1.0 / 6.0, -2.0 / 6.0},
      {-2.0 / 6.0, -1.0 / 6.0, 4.0 / 6.0, -1.0 / 6.0},
      {-1.0 / 6.0, -2.0 / 6.0, -1.0 / 6.0, 4.0 / 6.0},
  }};
  return k;
}

SubdomainStiffness assemble_subdomain(const Decomposition& decomp, std::size_t sub) {
  const GridSpec& spec = decomp.spec;
  const Substructure& s = decomp.substructures.at(sub);
  const int si = static_cast<int>(sub) % spec.nx;
  const int sj = static_cast<int>(sub) / spec.nx;
  const double rho = spec.coefficient(sub);

  auto local_of = [&](int node) -> long {
    auto it = std::lower_bound(s.nodes.begin(), s.nodes.end(), node);
    if (it == s.nodes.end() || *it != node) return -1;
    return static_cast<long>(it - s.nodes.begin());
  };

  SubdomainStiffness out{SymMatrix(s.nodes.size()), s.interior, s.interface};
  const auto& ke = q1_element_stiffness();
  for (int ej = sj * spec.m; ej < (sj + 1) * spec.m; ++ej) {
    for (int ei = si * spec.m; ei < (si + 1) * spec.m; ++ei) {
      const std::array<int, 4> corner = {ei + ej * decomp.nodes_x, ei + 1 + ej * decomp.nodes_x,
                                         ei + 1 + (ej + 1) * decomp.nodes_x,
                                         ei + (ej + 1) * decomp.nodes_x};
      std::array<long, 4> loc{};
      for (int a = 0; a < 4; ++a) loc[a] = local_of(corner[a]);
      for (int a = 0; a < 4; ++a) {
        if (loc[a] < 0) continue;
        for (int b = a; b < 4; ++b) {
          if (loc[b] < 0) continue;
          out.k.add(static_cast<std::size_t>(loc[a]), static_cast<std::size_t>(loc[b]),
                    rho * ke[a][b]);
        }
      }
    }
  }
  return out;
}

SymMatrix schur_complement(const SymMatrix& k, const std::vector<std::size_t>& interior,
                           const std::vector<std::size_t>& interface) {
  const std::size_t ni = interior.size();
  const std::size_t ng = interface.size();
  SymMatrix s(ng);
  for (std::size_t a = 0; a < ng; ++a)
    for (std::size_t b = a; b < ng; ++b) s.set(a, b, k(interface[a], interface[b]));
  if (ni == 0) return s;

  SymMatrix kii(ni);
  for (std::size_t a = 0; a < ni; ++a)
    for (std::size_t b = a; b < ni; ++b) kii.set(a, b, k(interior[a], interior[b]));
  Matrix kig(ni, ng);
  for (std::size_t a = 0; a < ni; ++a)
    for (std::size_t b = 0; b < ng; ++b) kig(a, b) = k(interior[a], interface[b]);

  const CholFactor f = cholesky(kii);
  const Matrix x = chol_solve(f, kig);
  const Matrix correction = kig.transpose() * x;
  Matrix full = s.dense();
  for (std::size_t a = 0; a < ng; ++a)
    for (std::size_t b = 0; b < ng; ++b) full(a, b) -= correction(a, b);
  return SymMatrix::symmetrize(full);
}

SchurLocal schur_local(const Decomposition& decomp, std::size_t sub) {
  const SubdomainStiffness st = assemble_subdomain(decomp, sub);
  const Substructure& s = decomp.substructures[sub];
  SchurLocal out;
  out.subdomain = sub;
  for (std::size_t local : st.interface) {
    out.interface_nodes.push_back(s.nodes[local]);
    out.stiffness_diagonal.push_back(st.k(local, local));
  }
  out.s = schur_complement(st.k, st.interior, st.interface);
  return out;
}

std::vector<SchurLocal> all_schur_locals(const Decomposition& decomp) {
  std::vector<SchurLocal> locals;
  locals.reserve(decomp.substructures.size());
  for (std::size_t i = 0; i < decomp.substructures.size(); ++i)
    locals.push_back(schur_local(decomp, i));
  return locals;
}

BlockOperator block_S(const std::vector<SchurLocal>& locals) {
  BlockOperator out;
  out.offsets.push_back(0);
  for (const auto& l : locals) out.offsets.push_back(out.offsets.back() + l.s.size());
  out.s = SymMatrix(out.offsets.back());
  for (std::size_t i = 0; i < locals.size(); ++i) {
    const std::size_t o = out.offsets[i];
    const SymMatrix& si = locals[i].s;
    for (std::size_t a = 0; a < si.size(); ++a)
      for (std::size_t b = a; b < si.size(); ++b) out.s.set(o + a, o + b, si(a, b));
  }
  return out;
}

} // namespace ddlab
