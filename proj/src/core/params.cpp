//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "params.hpp"

#include <cmath>

#include "rng.hpp"

namespace ipbind {
namespace {
Mlp2 zero_mlp(int in, int hidden, int out) {
  Mlp2 m;
  m.w1 = Matrix<double>::Zero(hidden, in);
  m.b1 = Vector<double>::Zero(hidden);
  m.w2 = Matrix<double>::Zero(out, hidden);
  m.b2 = Vector<double>::Zero(out);
  return m;
}

void glorot(Matrix<double> &w, Rng &rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (Eigen::Index i = 0; i < w.size(); ++i)
    w.data()[i] = rng.uniform(-a, a);
}

void add_mlp(std::vector<TensorRef> &out, const std::string &prefix, Mlp2 &m) {
  auto add = [&](const char *name, auto &t) {
    out.push_back({ prefix + name, { t.data(), static_cast<std::size_t>(t.size()) },
                    t.rows(), t.cols() });
  };
  add(".w1", m.w1);
  add(".b1", m.b1);
  add(".w2", m.w2);
  add(".b2", m.b2);
}
} // namespace

std::vector<TensorRef> tensors_of(ModelParams &params) {
  std::vector<TensorRef> out;
  for (std::size_t e = 0; e < params.encoders.size(); ++e) {
    auto &enc = params.encoders[e];
    const std::string prefix = "encoder" + std::to_string(e);
    out.push_back({ prefix + ".embedding",
                    { enc.embedding.data(),
                      static_cast<std::size_t>(enc.embedding.size()) },
                    enc.embedding.rows(), enc.embedding.cols() });
    add_mlp(out, prefix + ".edge", enc.edge);
    for (std::size_t l = 0; l < enc.layers.size(); ++l) {
      const std::string lp = prefix + ".layer" + std::to_string(l);
      add_mlp(out, lp + ".filter", enc.layers[l].filter);
      add_mlp(out, lp + ".update", enc.layers[l].update);
    }
  }
  add_mlp(out, "head", params.head);
  out.push_back({ "log_noise_sigma2", { &params.log_noise_sigma2, 1 }, 1, 1 });
  return out;
}

std::size_t parameter_count(const ModelParams &params) {
  std::size_t n = 0;
  for (const auto &t : tensors_of(const_cast<ModelParams &>(params)))
    n += t.data.size();
  return n;
}

ModelParams zero_params(const ModelConfig &config, double log_noise_sigma2) {
  const int d = config.hidden_dim;
  const int encoders =
      config.encoder_sharing == EncoderSharing::kShared ? 1 : 3;
  ModelParams p;
  for (int e = 0; e < encoders; ++e) {
    EncoderParams enc;
    enc.embedding = Matrix<double>::Zero(kEmbeddingRows, d);
    enc.edge = zero_mlp(config.rbf_count + 3, d, d);
    for (int l = 0; l < config.num_layers; ++l)
      enc.layers.push_back({ zero_mlp(3 * d, d, d), zero_mlp(d, d, d) });
    p.encoders.push_back(std::move(enc));
  }
  p.head = zero_mlp(d, d, 1);
  p.log_noise_sigma2 = log_noise_sigma2;
  return p;
}

constexpr double kResidualInitScale = 0.1;

ModelParams init_params(const ModelConfig &config, const LossConfig &loss,
                        std::uint64_t seed) {
  ModelParams p = zero_params(config, std::log(loss.noise_sigma2));
  Rng rng(seed);
  const double emb = std::sqrt(3.0);
  for (auto &enc : p.encoders) {
    for (Eigen::Index i = 0; i < enc.embedding.size(); ++i)
      enc.embedding.data()[i] = rng.uniform(-emb, emb);
    glorot(enc.edge.w1, rng);
    glorot(enc.edge.w2, rng);
    for (auto &layer : enc.layers) {
      glorot(layer.filter.w1, rng);
      glorot(layer.filter.w2, rng);
      glorot(layer.update.w1, rng);
      glorot(layer.update.w2, rng);
      // Small residual branch; the gated neighbor sum otherwise compounds
      // across layers.
      layer.update.w2 *= kResidualInitScale;
    }
  }
  glorot(p.head.w1, rng);
  glorot(p.head.w2, rng);
  return p;
}

bool all_finite(const ModelParams &params) {
  for (const auto &t : tensors_of(const_cast<ModelParams &>(params))) {
    for (double v : t.data) {
      if (!std::isfinite(v))
        return false;
    }
  }
  return true;
}

} // namespace ipbind
