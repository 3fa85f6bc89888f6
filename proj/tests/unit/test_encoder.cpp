//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "encoder.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "config.hpp"
#include "error.hpp"
#include "molgraph.hpp"
#include "params.hpp"
#include "rng.hpp"
#include "test_support.hpp"

namespace ipbind {
namespace {

struct GraphInputs {
  AtomGraph graph;
  EncoderInputs<double> inputs;
};

GraphInputs make_inputs(const Eigen::MatrixX3d &x, std::vector<int> z,
                        const ModelConfig &c) {
  GraphInputs g;
  g.graph = build_radius_graph(x, std::move(z), c.graph_cutoff);
  g.inputs.atomic_numbers = g.graph.atomic_numbers;
  g.inputs.src = g.graph.src;
  g.inputs.dst = g.graph.dst;
  g.inputs.rbf = rbf_expand(g.graph.dist, c.rbf_count, c.rbf_cutoff);
  g.inputs.relpos = g.graph.relpos;
  return g;
}

EncoderParams random_encoder(const ModelConfig &c, Rng &rng, double scale) {
  auto p = zero_params(c);
  testing::randomize(p, rng, scale);
  return p.encoders.front();
}

std::vector<int> random_elements(Rng &rng, int n) {
  const int pool[] = { 6, 7, 8, 16, 9, 1 };
  std::vector<int> z(n);
  for (auto &v : z)
    v = pool[rng.index(6)];
  return z;
}

TEST(EmbedNodes, LookupAndShape) {
  Rng rng(1);
  const auto table = testing::random_matrix(rng, kEmbeddingRows, 128);
  const std::vector<int> z = { 6, 8, 6 };
  const auto h = embed_nodes(table, z);
  EXPECT_EQ(h.rows(), 3);
  EXPECT_EQ(h.cols(), 128);
  EXPECT_EQ(h.row(0), h.row(2));
  EXPECT_EQ(h.row(1), table.row(8));
  EXPECT_TRUE(embed_nodes(Matrix<double>(Matrix<double>::Zero(kEmbeddingRows, 4)), z)
                  .isZero(0.0));
}

TEST(EmbedNodes, OutOfRangeRejected) {
  const Matrix<double> table = Matrix<double>::Zero(kEmbeddingRows, 4);
  for (int bad : { 0, -1, 119 }) {
    const std::vector<int> z = { 6, bad };
    EXPECT_THROW(embed_nodes(table, z), DataError);
  }
}

TEST(RbfExpand, Endpoints) {
  const auto at0 = rbf_expand(0.0, 32, 5.0);
  EXPECT_EQ(at0[0], 1.0);
  for (int k = 1; k < 32; ++k)
    EXPECT_LT(at0[k], at0[k - 1]);
  EXPECT_NEAR(rbf_expand(5.0, 32, 5.0)[31], 1.0, 1e-15);
}

TEST(RbfExpand, ClosedFormAtMidpoint) {
  const auto v = rbf_expand(2.5, 32, 5.0);
  const auto ref = testing::ref_rbf(2.5, 32, 5.0);
  ASSERT_EQ(v.size(), 32);
  for (int k = 0; k < 32; ++k)
    EXPECT_NEAR(v[k], ref[k], 1e-13);
  // Spot value: mu_15 = 75/31, gamma = 5/31.
  const double g = 5.0 / 31.0, mu = 75.0 / 31.0;
  EXPECT_NEAR(v[15], std::exp(-(2.5 - mu) * (2.5 - mu) / (2 * g * g)), 1e-13);
}

TEST(EmbedEdges, ZeroWeightsGiveZero) {
  ModelConfig c = testing::tiny_model();
  const auto p = zero_params(c);
  Rng rng(2);
  const auto g = make_inputs(testing::random_cloud(rng, 10, 5.0),
                             std::vector<int>(10, 6), c);
  const auto e = embed_edges(p.encoders[0].edge, g.inputs.rbf, g.inputs.relpos);
  EXPECT_EQ(e.rows(), g.graph.num_edges());
  EXPECT_TRUE(e.isZero(0.0));
}

TEST(EmbedEdges, SingleEdgeMatchesHandComposition) {
  ModelConfig c = testing::tiny_model();
  Rng rng(3);
  const auto enc = random_encoder(c, rng, 0.5);
  const Eigen::Vector3d dir = Eigen::Vector3d(0.3, -0.8, 0.52).normalized();
  Matrix<double> rbf = rbf_expand(3.1, c.rbf_count, c.rbf_cutoff).transpose();
  Matrix<double> rel = dir.transpose();
  const auto e = embed_edges(enc.edge, rbf, rel);
  testing::Vec in = testing::ref_rbf(3.1, c.rbf_count, c.rbf_cutoff);
  for (int k = 0; k < 3; ++k)
    in.push_back(dir[k]);
  auto ref = testing::ref_mlp(enc.edge, in);
  for (int k = 0; k < c.hidden_dim; ++k)
    EXPECT_NEAR(e(0, k), testing::ref_swish(ref[k]), 1e-12);
}

TEST(EmbedEdges, EqualGeometryEqualRows) {
  ModelConfig c = testing::tiny_model();
  Rng rng(4);
  const auto enc = random_encoder(c, rng, 0.5);
  Eigen::MatrixX3d x(4, 3);
  x << 0, 0, 0, 2, 0, 0, 10, 0, 0, 12, 0, 0;
  const auto g = make_inputs(x, { 6, 6, 6, 6 }, c);
  const auto e = embed_edges(enc.edge, g.inputs.rbf, g.inputs.relpos);
  // Edges (0,1) and (2,3) share distance and direction.
  EXPECT_EQ(e.row(0), e.row(2));
}

TEST(MessagePass, IsolatedNodeUnchanged) {
  ModelConfig c = testing::tiny_model();
  Rng rng(5);
  auto enc = random_encoder(c, rng, 0.5);
  enc.layers[0].update.b2.setZero();
  Eigen::MatrixX3d x(3, 3);
  x << 0, 0, 0, 1.5, 0, 0, 30, 0, 0;
  const auto g = make_inputs(x, { 6, 7, 8 }, c);
  const auto e = embed_edges(enc.edge, g.inputs.rbf, g.inputs.relpos);
  const auto h0 = embed_nodes(enc.embedding, g.inputs.atomic_numbers);
  const auto h1 = message_pass(enc.layers[0], h0, e, g.inputs.src, g.inputs.dst);
  // With both update biases zero an empty neighbor sum maps to zero.
  auto layer = enc.layers[0];
  layer.update.b1.setZero();
  const auto h1z = message_pass(layer, h0, e, g.inputs.src, g.inputs.dst);
  EXPECT_EQ(h1z.row(2), h0.row(2));
  EXPECT_NE(h1.row(0), h0.row(0));
}

TEST(MessagePass, ZeroFinalUpdateLayerIsIdentity) {
  ModelConfig c = testing::tiny_model();
  Rng rng(6);
  auto enc = random_encoder(c, rng, 0.5);
  enc.layers[0].update.w2.setZero();
  enc.layers[0].update.b2.setZero();
  const auto g = make_inputs(testing::random_cloud(rng, 12, 6.0),
                             random_elements(rng, 12), c);
  const auto h0 = embed_nodes(enc.embedding, g.inputs.atomic_numbers);
  const auto e = embed_edges(enc.edge, g.inputs.rbf, g.inputs.relpos);
  EXPECT_EQ(message_pass(enc.layers[0], h0, e, g.inputs.src, g.inputs.dst), h0);
}

TEST(Encode, PathGraphMatchesDenseReference) {
  ModelConfig c = testing::tiny_model();
  c.num_layers = 2;
  Rng rng(7);
  Eigen::MatrixX3d x(3, 3);
  x << 0, 0, 0, 1.4, 0.3, 0, 2.9, 0.1, 0.6; // 0-1-2 path, 0..2 beyond reach
  c.graph_cutoff = 2.0;
  const auto enc = random_encoder(c, rng, 0.3);
  const auto g = make_inputs(x, { 6, 7, 8 }, c);
  ASSERT_EQ(g.graph.num_edges(), 4);
  const auto h = encode(enc, g.inputs);
  const auto ref = testing::ref_encode(
      enc, testing::ref_graph({ 6, 7, 8 }, x, 2.0, c.rbf_count, c.rbf_cutoff));
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < c.hidden_dim; ++k)
      EXPECT_NEAR(h(i, k), ref[i][k], 1e-6);
}

TEST(Encode, RandomGraphsMatchDenseReference) {
  Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    ModelConfig c = testing::tiny_model();
    c.hidden_dim = 6 + trial;
    c.num_layers = 1 + trial % 3;
    c.rbf_count = 3 + trial;
    const auto enc = random_encoder(c, rng, 0.4);
    const auto x = testing::random_cloud(rng, 15, 8.0);
    const auto z = random_elements(rng, 15);
    const auto g = make_inputs(x, z, c);
    const auto h = encode(enc, g.inputs);
    const auto ref = testing::ref_encode(
        enc, testing::ref_graph(z, x, 5.0, c.rbf_count, c.rbf_cutoff));
    for (int i = 0; i < 15; ++i)
      for (int k = 0; k < c.hidden_dim; ++k)
        EXPECT_NEAR(h(i, k), ref[i][k], 1e-6 * (1 + std::abs(ref[i][k])));
  }
}

TEST(Encode, FloatPathTracksDouble) {
  ModelConfig c = testing::tiny_model();
  Rng rng(9);
  const auto enc = random_encoder(c, rng, 0.4);
  const auto g = make_inputs(testing::random_cloud(rng, 12, 6.0),
                             random_elements(rng, 12), c);
  EncoderInputs<float> fin { g.inputs.atomic_numbers, g.inputs.src, g.inputs.dst,
                             g.inputs.rbf.cast<float>(), g.inputs.relpos.cast<float>() };
  const auto hd = encode(enc, g.inputs);
  const auto hf = encode(enc.cast<float>(), fin);
  EXPECT_LE((hf.cast<double>() - hd).cwiseAbs().maxCoeff(),
            1e-4 * (1 + hd.cwiseAbs().maxCoeff()));
}

TEST(Encode, ZeroLayersReturnsEmbedding) {
  ModelConfig c = testing::tiny_model();
  c.num_layers = 0;
  Rng rng(10);
  const auto enc = random_encoder(c, rng, 1.0);
  ASSERT_TRUE(enc.layers.empty());
  const auto g = make_inputs(testing::random_cloud(rng, 5, 4.0),
                             random_elements(rng, 5), c);
  EXPECT_EQ(encode(enc, g.inputs), embed_nodes(enc.embedding, g.inputs.atomic_numbers));
}

TEST(Encode, PermutationEquivariance) {
  Rng rng(11);
  ModelConfig c = testing::tiny_model();
  c.num_layers = 3;
  const auto enc = random_encoder(c, rng, 0.4);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 20;
    const auto x = testing::random_cloud(rng, n, 8.0);
    const auto z = random_elements(rng, n);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    Eigen::MatrixX3d xp(n, 3);
    std::vector<int> zp(n);
    for (int k = 0; k < n; ++k) {
      xp.row(k) = x.row(perm[k]);
      zp[k] = z[perm[k]];
    }
    const auto a = make_inputs(x, z, c);
    const auto b = make_inputs(xp, zp, c);
    const auto ha = encode(enc, a.inputs);
    const auto hb = encode(enc, b.inputs);
    for (int k = 0; k < n; ++k)
      EXPECT_LE((hb.row(k) - ha.row(perm[k])).cwiseAbs().maxCoeff(),
                1e-12 * (1 + ha.row(perm[k]).cwiseAbs().maxCoeff()));
  }
}

TEST(Encode, Locality) {
  Rng rng(12);
  ModelConfig c = testing::tiny_model();
  c.num_layers = 2;
  const auto enc = random_encoder(c, rng, 0.4);
  // Chain along x with 3 A spacing; atom 0 sees at most 2 hops (6 A).
  const int n = 8;
  Eigen::MatrixX3d x = Eigen::MatrixX3d::Zero(n, 3);
  for (int k = 0; k < n; ++k)
    x(k, 0) = 3.0 * k;
  const auto z = random_elements(rng, n);
  const auto base = encode(enc, make_inputs(x, z, c).inputs);
  Eigen::MatrixX3d moved = x;
  moved.row(n - 1) += Eigen::RowVector3d(0.7, 1.9, -1.1); // stays > 2 cutoffs away
  const auto after = encode(enc, make_inputs(moved, z, c).inputs);
  EXPECT_EQ(after.row(0), base.row(0));
  EXPECT_NE(after.row(n - 1), base.row(n - 1));
}

TEST(Mlp2Backward, MatchesFiniteDifferences) {
  Rng rng(13);
  Mlp2 m { testing::random_matrix(rng, 5, 4), testing::random_matrix(rng, 5, 1),
           testing::random_matrix(rng, 3, 5), testing::random_matrix(rng, 3, 1) };
  const Matrix<double> x = testing::random_matrix(rng, 6, 4);
  const Matrix<double> w = testing::random_matrix(rng, 6, 3);
  auto objective = [&](const Mlp2 &mm, const Matrix<double> &xx) {
    return mlp2_forward(mm, xx).cwiseProduct(w).sum();
  };
  Mlp2Tape<double> tape;
  mlp2_forward(m, x, &tape);
  Mlp2 grad { Matrix<double>::Zero(5, 4), Vector<double>::Zero(5),
              Matrix<double>::Zero(3, 5), Vector<double>::Zero(3) };
  const auto dx = mlp2_backward(m, tape, w, grad, true);
  const double h = 1e-6;
  for (Eigen::Index k = 0; k < m.w1.size(); ++k) {
    Mlp2 p = m, q = m;
    p.w1.data()[k] += h;
    q.w1.data()[k] -= h;
    EXPECT_NEAR(grad.w1.data()[k], (objective(p, x) - objective(q, x)) / (2 * h), 1e-6);
  }
  for (Eigen::Index k = 0; k < m.b2.size(); ++k) {
    Mlp2 p = m, q = m;
    p.b2[k] += h;
    q.b2[k] -= h;
    EXPECT_NEAR(grad.b2[k], (objective(p, x) - objective(q, x)) / (2 * h), 1e-6);
  }
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Matrix<double> p = x, q = x;
    p.data()[k] += h;
    q.data()[k] -= h;
    EXPECT_NEAR(dx.data()[k], (objective(m, p) - objective(m, q)) / (2 * h), 1e-6);
  }
}

} // namespace
} // namespace ipbind
