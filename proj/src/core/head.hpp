//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef IPBIND_CORE_HEAD_HPP_
#define IPBIND_CORE_HEAD_HPP_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "encoder.hpp"
#include "frames.hpp"
#include "molgraph.hpp"
#include "params.hpp"
#include "structio.hpp"

namespace ipbind {

// E_i = MLP(h_i), one scalar per atom.
template <class T>
Vector<T> atomic_energies(const BasicMlp2<T> &head, const Matrix<T> &h,
                          Mlp2Tape<T> *tape = nullptr);

// Parameter-independent view of one graph: edges, RBF features and the
// per-frame unit relative positions.
struct PreparedGraph {
  AtomGraph graph;
  Matrix<double> rbf;
  FrameSet frames;
  std::vector<Matrix<double>> relpos; // one per frame
};

struct PreparedComplex {
  std::string id;
  std::optional<double> label;
  // Indexed by GraphRole: complex, protein, ligand.
  std::array<PreparedGraph, 3> graphs;
  int num_protein = 0;
  int num_ligand = 0;

  const PreparedGraph &graph(GraphRole role) const {
    return graphs[static_cast<int>(role)];
  }
};

PreparedGraph prepare_graph(AtomGraph graph, const ModelConfig &config);
PreparedComplex prepare_complex(const PocketComplex &pc,
                                const ModelConfig &config,
                                std::string id = {});

// Encoder used for a graph role under the configured sharing.
template <class T>
const BasicEncoderParams<T> &encoder_for(const BasicModelParams<T> &params,
                                         GraphRole role) {
  return params.encoders.size() == 1 ? params.encoders.front()
                                     : params.encoders[static_cast<int>(role)];
}

// Per-atom energies of one graph averaged over its frames (fixed order).
template <class T>
Vector<double> graph_energies(const BasicModelParams<T> &params,
                              const PreparedGraph &graph, GraphRole role);

struct PredictionReport {
  double affinity = 0.0;
  // All three are indexed by complex atom (pocket atoms, then ligand atoms).
  Vector<double> per_atom_bound;
  Vector<double> per_atom_unbound;
  Vector<double> per_atom_delta; // bound - unbound
};

// affinity = sum_i (unbound_i - bound_i) for the difference framework;
// -sum_i bound_i for complex_only (unbound energies are then zero).
template <class T>
PredictionReport predict(const BasicModelParams<T> &params,
                         const ModelConfig &config,
                         const PreparedComplex &prepared);

// Convenience: prepares, then predicts at the configured precision.
PredictionReport predict(const ModelParams &params, const ModelConfig &config,
                         const PocketComplex &pc);

// Adds d_affinity * d affinity / d params into grad (log_noise_sigma2 is
// untouched). Frames are fixed functions of the input coordinates.
void accumulate_affinity_gradient(const ModelParams &params,
                                  const ModelConfig &config,
                                  const PreparedComplex &prepared,
                                  double d_affinity, ModelParams &grad);

// CSV: atom_index,source,element,x,y,z,e_unbound,e_bound,delta
std::string attribution_csv(const PredictionReport &report,
                            const PocketComplex &pc);

// Complex atoms with the per-atom delta in the B-factor column.
std::string attribution_pdb(const PredictionReport &report,
                            const PocketComplex &pc);

} // namespace ipbind

#endif // IPBIND_CORE_HEAD_HPP_
