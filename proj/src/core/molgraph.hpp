//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef IPBIND_CORE_MOLGRAPH_HPP_
#define IPBIND_CORE_MOLGRAPH_HPP_

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "structio.hpp"

namespace ipbind {

constexpr double kDefaultCutoff = 5.0;

// Directed radius graph. Edge k runs from src[k] (the receiving atom i) to
// dst[k] (neighbor j); edges are sorted by (i, j) and both directions of
// every pair are present.
struct AtomGraph {
  std::vector<int> atomic_numbers;
  Eigen::MatrixX3d coords;
  std::vector<int> src;
  std::vector<int> dst;
  Eigen::VectorXd dist;
  Eigen::MatrixX3d relpos; // unit (x_j - x_i) / d_ij
  int skipped_coincident_pairs = 0;

  int num_nodes() const { return static_cast<int>(atomic_numbers.size()); }
  int num_edges() const { return static_cast<int>(src.size()); }
  std::vector<std::pair<int, int>> edge_pairs() const;
};

// Pairs with 0 < |x_j - x_i| <= cutoff (inclusive). Coincident atoms produce
// no edge and a warning.
AtomGraph build_radius_graph(const Eigen::MatrixX3d &coords,
                             std::vector<int> atomic_numbers,
                             double cutoff = kDefaultCutoff);
AtomGraph build_radius_graph(const MolecularStructure &structure,
                             double cutoff = kDefaultCutoff);

enum class GraphRole { kComplex = 0, kProtein = 1, kLigand = 2 };

struct GraphTriple {
  AtomGraph complex_graph;
  AtomGraph protein_graph;
  AtomGraph ligand_graph;
  int num_protein = 0;
  int num_ligand = 0;

  // Complex node -> (source graph, node index in that graph).
  std::pair<GraphRole, int> source_of(int complex_node) const {
    if (complex_node < num_protein)
      return { GraphRole::kProtein, complex_node };
    return { GraphRole::kLigand, complex_node - num_protein };
  }
};

GraphTriple build_graph_triple(const PocketComplex &pc,
                               double cutoff = kDefaultCutoff);

} // namespace ipbind

#endif // IPBIND_CORE_MOLGRAPH_HPP_
