//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "head.hpp"

#include <cstdio>

#include "error.hpp"

namespace ipbind {
namespace {
EncoderParams &mutable_encoder(ModelParams &params, GraphRole role) {
  return params.encoders.size() == 1 ? params.encoders.front()
                                     : params.encoders[static_cast<int>(role)];
}

template <class T>
EncoderInputs<T> inputs_for(const PreparedGraph &g, std::size_t frame) {
  EncoderInputs<T> in;
  in.atomic_numbers = g.graph.atomic_numbers;
  in.src = g.graph.src;
  in.dst = g.graph.dst;
  in.rbf = g.rbf.template cast<T>();
  in.relpos = g.relpos[frame].template cast<T>();
  return in;
}

std::span<const GraphRole> roles_for(Framework framework) {
  static constexpr GraphRole all[] = { GraphRole::kComplex, GraphRole::kProtein,
                                       GraphRole::kLigand };
  return framework == Framework::kDifference ? std::span<const GraphRole>(all)
                                             : std::span<const GraphRole>(all, 1);
}
} // namespace

template <class T>
Vector<T> atomic_energies(const BasicMlp2<T> &head, const Matrix<T> &h,
                          Mlp2Tape<T> *tape) {
  const Matrix<T> out = mlp2_forward(head, h, tape);
  return out.col(0);
}

PreparedGraph prepare_graph(AtomGraph graph, const ModelConfig &config) {
  PreparedGraph p;
  p.rbf = rbf_expand(graph.dist, config.rbf_count, config.rbf_cutoff);
  p.frames = compute_frames(graph.coords, config.frame_mode);
  for (const auto &rot : p.frames.rotations) {
    const Eigen::MatrixX3d x = apply_frame(graph.coords, rot, p.frames.centroid);
    Matrix<double> rel(graph.num_edges(), 3);
    for (int k = 0; k < graph.num_edges(); ++k)
      rel.row(k) = (x.row(graph.dst[k]) - x.row(graph.src[k])) / graph.dist[k];
    p.relpos.push_back(std::move(rel));
  }
  p.graph = std::move(graph);
  return p;
}

PreparedComplex prepare_complex(const PocketComplex &pc,
                                const ModelConfig &config, std::string id) {
  auto triple = build_graph_triple(pc, config.graph_cutoff);
  PreparedComplex out;
  out.id = std::move(id);
  out.label = pc.label;
  out.num_protein = triple.num_protein;
  out.num_ligand = triple.num_ligand;
  out.graphs[0] = prepare_graph(std::move(triple.complex_graph), config);
  out.graphs[1] = prepare_graph(std::move(triple.protein_graph), config);
  out.graphs[2] = prepare_graph(std::move(triple.ligand_graph), config);
  return out;
}

template <class T>
Vector<double> graph_energies(const BasicModelParams<T> &params,
                              const PreparedGraph &graph, GraphRole role) {
  const auto &enc = encoder_for(params, role);
  const std::size_t frames = graph.relpos.size();
  Vector<double> sum = Vector<double>::Zero(graph.graph.num_nodes());
  for (std::size_t f = 0; f < frames; ++f) {
    const auto in = inputs_for<T>(graph, f);
    const Matrix<T> h = encode(enc, in);
    sum += atomic_energies(params.head, h).template cast<double>();
  }
  return sum / static_cast<double>(frames);
}

template <class T>
PredictionReport predict(const BasicModelParams<T> &params,
                         const ModelConfig &config,
                         const PreparedComplex &prepared) {
  const int np = prepared.num_protein;
  const int nl = prepared.num_ligand;
  PredictionReport r;
  r.per_atom_bound = graph_energies(
      params, prepared.graph(GraphRole::kComplex), GraphRole::kComplex);
  r.per_atom_unbound = Vector<double>::Zero(np + nl);
  if (config.framework == Framework::kDifference) {
    r.per_atom_unbound.head(np) = graph_energies(
        params, prepared.graph(GraphRole::kProtein), GraphRole::kProtein);
    r.per_atom_unbound.tail(nl) = graph_energies(
        params, prepared.graph(GraphRole::kLigand), GraphRole::kLigand);
  }
  r.per_atom_delta = r.per_atom_bound - r.per_atom_unbound;
  r.affinity = -r.per_atom_delta.sum();
  if (!std::isfinite(r.affinity))
    throw NumericalError("predict: non-finite affinity" +
                         (prepared.id.empty() ? std::string()
                                              : " for '" + prepared.id + "'"));
  return r;
}

PredictionReport predict(const ModelParams &params, const ModelConfig &config,
                         const PocketComplex &pc) {
  const auto prepared = prepare_complex(pc, config);
  if (config.precision == Precision::kFloat32)
    return predict(params.cast<float>(), config, prepared);
  return predict(params, config, prepared);
}

void accumulate_affinity_gradient(const ModelParams &params,
                                  const ModelConfig &config,
                                  const PreparedComplex &prepared,
                                  double d_affinity, ModelParams &grad) {
  for (GraphRole role : roles_for(config.framework)) {
    const auto &g = prepared.graph(role);
    const auto &enc = encoder_for(params, role);
    auto &enc_grad = mutable_encoder(grad, role);
    const double sign = role == GraphRole::kComplex ? -1.0 : 1.0;
    const std::size_t frames = g.relpos.size();
    const Matrix<double> d_energy = Matrix<double>::Constant(
        g.graph.num_nodes(), 1,
        sign * d_affinity / static_cast<double>(frames));

    for (std::size_t f = 0; f < frames; ++f) {
      const auto in = inputs_for<double>(g, f);
      EncodeTape<double> enc_tape;
      Mlp2Tape<double> head_tape;
      const Matrix<double> h = encode(enc, in, &enc_tape);
      atomic_energies(params.head, h, &head_tape);
      const Matrix<double> d_h =
          mlp2_backward(params.head, head_tape, d_energy, grad.head);
      encode_backward(enc, in, enc_tape, d_h, enc_grad);
    }
  }
}

std::string attribution_csv(const PredictionReport &report,
                            const PocketComplex &pc) {
  if (static_cast<std::size_t>(report.per_atom_bound.size()) !=
      pc.complex.size())
    throw UsageError("attribution_csv: report does not match complex");
  std::string out = "atom_index,source,element,x,y,z,e_unbound,e_bound,delta\n";
  char buf[256];
  for (std::size_t i = 0; i < pc.complex.size(); ++i) {
    const auto &a = pc.complex.atoms[i];
    const auto k = static_cast<Eigen::Index>(i);
    std::snprintf(buf, sizeof buf, "%zu,%s,%s,%.3f,%.3f,%.3f,%.9g,%.9g,%.9g\n",
                  i, a.source == AtomSource::kProtein ? "protein" : "ligand",
                  std::string(a.element()).c_str(), a.position.x(),
                  a.position.y(), a.position.z(), report.per_atom_unbound[k],
                  report.per_atom_bound[k], report.per_atom_delta[k]);
    out += buf;
  }
  return out;
}

std::string attribution_pdb(const PredictionReport &report,
                            const PocketComplex &pc) {
  const std::vector<double> delta(report.per_atom_delta.begin(),
                                  report.per_atom_delta.end());
  return write_pdb(pc.complex, &delta);
}

template Vector<float> atomic_energies(const BasicMlp2<float> &,
                                       const Matrix<float> &, Mlp2Tape<float> *);
template Vector<double> atomic_energies(const BasicMlp2<double> &,
                                        const Matrix<double> &,
                                        Mlp2Tape<double> *);
template Vector<double> graph_energies(const BasicModelParams<float> &,
                                       const PreparedGraph &, GraphRole);
template Vector<double> graph_energies(const BasicModelParams<double> &,
                                       const PreparedGraph &, GraphRole);
template PredictionReport predict(const BasicModelParams<float> &,
                                  const ModelConfig &, const PreparedComplex &);
template PredictionReport predict(const BasicModelParams<double> &,
                                  const ModelConfig &, const PreparedComplex &);

} // namespace ipbind
