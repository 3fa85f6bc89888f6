//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Independent oracles for the test suites. Nothing here calls into the
// code paths it is used to check: the dense reference model uses plain
// loops over explicit concatenations, the graph and pocket oracles are
// O(n^2) enumerations.

#ifndef IPBIND_TESTS_TEST_SUPPORT_HPP_
#define IPBIND_TESTS_TEST_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "encoder.hpp"
#include "head.hpp"
#include "params.hpp"
#include "rng.hpp"
#include "structio.hpp"
#include "synthetic.hpp"

namespace ipbind::testing {

using EdgeSet = std::set<std::pair<int, int>>;

inline EdgeSet brute_force_edges(const Eigen::MatrixX3d &x, double cutoff) {
  EdgeSet edges;
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < x.rows(); ++j) {
      if (i == j)
        continue;
      double d2 = 0.0;
      for (int k = 0; k < 3; ++k)
        d2 += (x(j, k) - x(i, k)) * (x(j, k) - x(i, k));
      if (d2 > 0.0 && d2 <= cutoff * cutoff)
        edges.emplace(i, j);
    }
  }
  return edges;
}

inline EdgeSet edge_set(const AtomGraph &g) {
  auto pairs = g.edge_pairs();
  return EdgeSet(pairs.begin(), pairs.end());
}

// Residues kept by ranking every residue on its minimum pair distance to
// the ligand, ties by first appearance.
inline std::set<ResidueId> brute_force_pocket(const MolecularStructure &protein,
                                              const MolecularStructure &ligand,
                                              int max_residues) {
  std::vector<ResidueId> order;
  std::map<ResidueId, double> best;
  for (const auto &a : protein.atoms) {
    const ResidueId rid = *a.residue;
    if (!best.count(rid)) {
      order.push_back(rid);
      best[rid] = INFINITY;
    }
    for (const auto &l : ligand.atoms) {
      const double dx = a.position.x() - l.position.x();
      const double dy = a.position.y() - l.position.y();
      const double dz = a.position.z() - l.position.z();
      best[rid] = std::min(best[rid], std::sqrt(dx * dx + dy * dy + dz * dz));
    }
  }
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t k = 0; k < order.size(); ++k)
    ranked.emplace_back(best[order[k]], k);
  std::sort(ranked.begin(), ranked.end());
  std::set<ResidueId> kept;
  for (std::size_t k = 0;
       k < ranked.size() && k < static_cast<std::size_t>(max_residues); ++k)
    kept.insert(order[ranked[k].second]);
  return kept;
}

inline std::set<ResidueId> residues_of(const MolecularStructure &s) {
  std::set<ResidueId> out;
  for (const auto &a : s.atoms)
    out.insert(*a.residue);
  return out;
}

// ---- dense reference forward pass ----------------------------------------

using Vec = std::vector<double>;

inline double ref_swish(double x) { return x / (1.0 + std::exp(-x)); }

inline Vec ref_linear(const Matrix<double> &w, const Vector<double> &b,
                      const Vec &x) {
  Vec y(static_cast<std::size_t>(w.rows()));
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    double s = b[r];
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      s += w(r, c) * x[static_cast<std::size_t>(c)];
    y[static_cast<std::size_t>(r)] = s;
  }
  return y;
}

inline Vec ref_mlp(const Mlp2 &m, const Vec &x) {
  Vec h = ref_linear(m.w1, m.b1, x);
  for (auto &v : h)
    v = ref_swish(v);
  return ref_linear(m.w2, m.b2, h);
}

inline Vec concat(std::initializer_list<const Vec *> parts) {
  Vec out;
  for (const auto *p : parts)
    out.insert(out.end(), p->begin(), p->end());
  return out;
}

inline Vec ref_rbf(double d, int count, double cutoff) {
  Vec out(static_cast<std::size_t>(count));
  const double spacing = cutoff / (count - 1);
  for (int k = 0; k < count; ++k) {
    const double mu = k * spacing;
    out[static_cast<std::size_t>(k)] =
        std::exp(-(d - mu) * (d - mu) / (2.0 * spacing * spacing));
  }
  return out;
}

struct RefGraph {
  std::vector<int> z;
  std::vector<std::pair<int, int>> edges; // (i, j)
  std::vector<Vec> edge_input;            // rbf ++ unit relpos
};

inline RefGraph ref_graph(const std::vector<int> &z, const Eigen::MatrixX3d &x,
                          double cutoff, int rbf_count, double rbf_cutoff) {
  RefGraph g;
  g.z = z;
  for (const auto &[i, j] : brute_force_edges(x, cutoff)) {
    const Eigen::RowVector3d delta = x.row(j) - x.row(i);
    const double d = delta.norm();
    Vec in = ref_rbf(d, rbf_count, rbf_cutoff);
    for (int k = 0; k < 3; ++k)
      in.push_back(delta[k] / d);
    g.edges.emplace_back(i, j);
    g.edge_input.push_back(std::move(in));
  }
  return g;
}

inline std::vector<Vec> ref_encode(const EncoderParams &p, const RefGraph &g) {
  const std::size_t n = g.z.size();
  std::vector<Vec> h(n);
  for (std::size_t i = 0; i < n; ++i) {
    h[i].resize(static_cast<std::size_t>(p.embedding.cols()));
    for (Eigen::Index c = 0; c < p.embedding.cols(); ++c)
      h[i][static_cast<std::size_t>(c)] = p.embedding(g.z[i], c);
  }
  std::vector<Vec> e;
  for (const auto &in : g.edge_input) {
    Vec v = ref_mlp(p.edge, in);
    for (auto &x : v)
      x = ref_swish(x);
    e.push_back(std::move(v));
  }
  for (const auto &layer : p.layers) {
    std::vector<Vec> agg(n, Vec(h[0].size(), 0.0));
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
      const auto [i, j] = g.edges[k];
      Vec f = ref_mlp(layer.filter, concat({ &e[k], &h[i], &h[j] }));
      for (std::size_t c = 0; c < f.size(); ++c)
        agg[i][c] += h[j][c] * ref_swish(f[c]);
    }
    std::vector<Vec> next = h;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec u = ref_mlp(layer.update, agg[i]);
      for (std::size_t c = 0; c < u.size(); ++c)
        next[i][c] += u[c];
    }
    h = std::move(next);
  }
  return h;
}

inline Vec ref_energies(const Mlp2 &head, const std::vector<Vec> &h) {
  Vec out;
  for (const auto &row : h)
    out.push_back(ref_mlp(head, row)[0]);
  return out;
}

// ---- fixtures --------------------------------------------------------------

inline SyntheticOptions small_complex_options() {
  SyntheticOptions opt;
  opt.residues_min = 3;
  opt.residues_max = 5;
  opt.atoms_per_residue_min = 3;
  opt.atoms_per_residue_max = 5;
  opt.ligand_atoms_min = 4;
  opt.ligand_atoms_max = 7;
  return opt;
}

inline ModelConfig tiny_model(FrameMode mode = FrameMode::kSE3) {
  ModelConfig c;
  c.hidden_dim = 8;
  c.num_layers = 1;
  c.rbf_count = 4;
  c.frame_mode = mode;
  return c;
}

inline Eigen::MatrixX3d random_cloud(Rng &rng, int n, double box) {
  Eigen::MatrixX3d x(n, 3);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < 3; ++k)
      x(i, k) = rng.uniform(0.0, box);
  return x;
}

inline Matrix<double> random_matrix(Rng &rng, Eigen::Index r, Eigen::Index c,
                                    double scale = 1.0) {
  Matrix<double> m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m.data()[i] = scale * rng.uniform(-1.0, 1.0);
  return m;
}

// Every tensor gets random values (biases included).
inline void randomize(ModelParams &p, Rng &rng, double scale) {
  for (auto &t : tensors_of(p))
    for (auto &v : t.data)
      v = scale * rng.uniform(-1.0, 1.0);
}

} // namespace ipbind::testing

#endif // IPBIND_TESTS_TEST_SUPPORT_HPP_
