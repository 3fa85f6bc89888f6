//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "molgraph.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <unordered_map>

#include "error.hpp"

namespace ipbind {
namespace {
struct CellKey {
  long long x, y, z;
  bool operator==(const CellKey &) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey &k) const noexcept {
    auto h = static_cast<std::size_t>(k.x) * 73856093u;
    h ^= static_cast<std::size_t>(k.y) * 19349663u;
    h ^= static_cast<std::size_t>(k.z) * 83492791u;
    return h;
  }
};
} // namespace

std::vector<std::pair<int, int>> AtomGraph::edge_pairs() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(src.size());
  for (std::size_t k = 0; k < src.size(); ++k)
    out.emplace_back(src[k], dst[k]);
  return out;
}

AtomGraph build_radius_graph(const Eigen::MatrixX3d &coords,
                             std::vector<int> atomic_numbers, double cutoff) {
  if (coords.rows() < 1)
    throw DataError("build_radius_graph: empty structure");
  if (static_cast<std::size_t>(coords.rows()) != atomic_numbers.size())
    throw UsageError("build_radius_graph: coordinate/atom count mismatch");
  if (!(cutoff > 0.0))
    throw UsageError("build_radius_graph: cutoff must be positive");
  if (!coords.allFinite())
    throw DataError("build_radius_graph: non-finite coordinates");

  const int n = static_cast<int>(coords.rows());
  const double cutoff2 = cutoff * cutoff;

  std::unordered_map<CellKey, std::vector<int>, CellHash> cells;
  std::vector<CellKey> cell_of(n);
  for (int i = 0; i < n; ++i) {
    CellKey key { static_cast<long long>(std::floor(coords(i, 0) / cutoff)),
                  static_cast<long long>(std::floor(coords(i, 1) / cutoff)),
                  static_cast<long long>(std::floor(coords(i, 2) / cutoff)) };
    cell_of[i] = key;
    cells[key].push_back(i);
  }

  AtomGraph g;
  g.atomic_numbers = std::move(atomic_numbers);
  g.coords = coords;

  std::vector<int> neighbors;
  for (int i = 0; i < n; ++i) {
    neighbors.clear();
    const auto c = cell_of[i];
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        for (long long dz = -1; dz <= 1; ++dz) {
          auto it = cells.find(CellKey { c.x + dx, c.y + dy, c.z + dz });
          if (it == cells.end())
            continue;
          for (int j : it->second) {
            if (j == i)
              continue;
            const double d2 = (coords.row(j) - coords.row(i)).squaredNorm();
            if (d2 > cutoff2)
              continue;
            if (d2 == 0.0) {
              if (i < j)
                ++g.skipped_coincident_pairs;
              continue;
            }
            neighbors.push_back(j);
          }
        }
      }
    }
    std::sort(neighbors.begin(), neighbors.end());
    for (int j : neighbors) {
      g.src.push_back(i);
      g.dst.push_back(j);
    }
  }

  const auto m = static_cast<Eigen::Index>(g.src.size());
  g.dist.resize(m);
  g.relpos.resize(m, 3);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::RowVector3d delta = coords.row(g.dst[k]) - coords.row(g.src[k]);
    g.dist[k] = delta.norm();
    g.relpos.row(k) = delta / g.dist[k];
  }

  if (g.skipped_coincident_pairs > 0) {
    warn("build_radius_graph: skipped " +
         std::to_string(g.skipped_coincident_pairs) +
         " coincident atom pair(s)");
  }
  return g;
}

AtomGraph build_radius_graph(const MolecularStructure &structure,
                             double cutoff) {
  return build_radius_graph(structure.coordinates(), structure.atomic_numbers(),
                            cutoff);
}

GraphTriple build_graph_triple(const PocketComplex &pc, double cutoff) {
  if (pc.complex.size() != pc.protein_pocket.size() + pc.ligand.size())
    throw UsageError("build_graph_triple: complex is not pocket ++ ligand");
  GraphTriple t;
  t.complex_graph = build_radius_graph(pc.complex, cutoff);
  t.protein_graph = build_radius_graph(pc.protein_pocket, cutoff);
  t.ligand_graph = build_radius_graph(pc.ligand, cutoff);
  t.num_protein = static_cast<int>(pc.protein_pocket.size());
  t.num_ligand = static_cast<int>(pc.ligand.size());
  return t;
}

} // namespace ipbind
