//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef IPBIND_CORE_PARAMS_HPP_
#define IPBIND_CORE_PARAMS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "config.hpp"

namespace ipbind {

// Row-per-item layout for node and edge features.
template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

constexpr int kEmbeddingRows = 119; // atomic numbers 0..118, row 0 unused

// Two-layer perceptron y = W2 swish(W1 x + b1) + b2, weights stored out x in.
template <class T>
struct BasicMlp2 {
  Matrix<T> w1;
  Vector<T> b1;
  Matrix<T> w2;
  Vector<T> b2;

  template <class U>
  BasicMlp2<U> cast() const {
    return { w1.template cast<U>(), b1.template cast<U>(),
             w2.template cast<U>(), b2.template cast<U>() };
  }
};

template <class T>
struct BasicLayerParams {
  BasicMlp2<T> filter; // 3d -> d
  BasicMlp2<T> update; // d -> d

  template <class U>
  BasicLayerParams<U> cast() const {
    return { filter.template cast<U>(), update.template cast<U>() };
  }
};

template <class T>
struct BasicEncoderParams {
  Matrix<T> embedding; // 119 x d
  BasicMlp2<T> edge;   // K + 3 -> d
  std::vector<BasicLayerParams<T>> layers;

  template <class U>
  BasicEncoderParams<U> cast() const {
    BasicEncoderParams<U> out;
    out.embedding = embedding.template cast<U>();
    out.edge = edge.template cast<U>();
    for (const auto &l : layers)
      out.layers.push_back(l.template cast<U>());
    return out;
  }
};

// One encoder when shared; otherwise complex, protein, ligand in that order.
template <class T>
struct BasicModelParams {
  std::vector<BasicEncoderParams<T>> encoders;
  BasicMlp2<T> head; // d -> d -> 1
  T log_noise_sigma2 = 0;

  template <class U>
  BasicModelParams<U> cast() const {
    BasicModelParams<U> out;
    for (const auto &e : encoders)
      out.encoders.push_back(e.template cast<U>());
    out.head = head.template cast<U>();
    out.log_noise_sigma2 = static_cast<U>(log_noise_sigma2);
    return out;
  }
};

using Mlp2 = BasicMlp2<double>;
using LayerParams = BasicLayerParams<double>;
using EncoderParams = BasicEncoderParams<double>;
using ModelParams = BasicModelParams<double>;
using HeadParams = Mlp2;

struct TensorRef {
  std::string name;
  std::span<double> data;
  Eigen::Index rows;
  Eigen::Index cols;
};

// Every learnable tensor in a fixed order, with stable names.
std::vector<TensorRef> tensors_of(ModelParams &params);
std::size_t parameter_count(const ModelParams &params);

// Same shapes as the config implies, all entries zero.
ModelParams zero_params(const ModelConfig &config, double log_noise_sigma2 = 0);

// Glorot-uniform weights, unit-variance embeddings, zero biases.
ModelParams init_params(const ModelConfig &config, const LossConfig &loss,
                        std::uint64_t seed);

bool all_finite(const ModelParams &params);

} // namespace ipbind

#endif // IPBIND_CORE_PARAMS_HPP_
