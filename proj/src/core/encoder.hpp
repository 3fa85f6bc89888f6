//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef IPBIND_CORE_ENCODER_HPP_
#define IPBIND_CORE_ENCODER_HPP_

#include <span>
#include <vector>

#include "params.hpp"

namespace ipbind {

template <class T>
Matrix<T> swish(const Matrix<T> &x);
// d swish / dx evaluated at x
template <class T>
Matrix<T> swish_grad(const Matrix<T> &x);

template <class T>
struct Mlp2Tape {
  Matrix<T> input;
  Matrix<T> pre;    // W1 x + b1
  Matrix<T> hidden; // swish(pre)
};

// Rows of x are independent items.
template <class T>
Matrix<T> mlp2_forward(const BasicMlp2<T> &mlp, const Matrix<T> &x,
                       Mlp2Tape<T> *tape = nullptr);

// Accumulates parameter gradients into grad; returns d loss / d input when
// want_input_grad is set (otherwise an empty matrix).
Matrix<double> mlp2_backward(const Mlp2 &mlp, const Mlp2Tape<double> &tape,
                             const Matrix<double> &d_out, Mlp2 &grad,
                             bool want_input_grad = true);

// h0_i = table[z_i]; throws DataError for z outside [1, 118].
template <class T>
Matrix<T> embed_nodes(const Matrix<T> &table, std::span<const int> atomic_numbers);

// Gaussian basis exp(-(d - mu_k)^2 / (2 gamma^2)), mu_k evenly spaced on
// [0, cutoff], gamma the center spacing.
Vector<double> rbf_expand(double distance, int count, double cutoff);
Matrix<double> rbf_expand(const Vector<double> &distances, int count,
                          double cutoff);

// Frame-specific encoder inputs for one graph.
template <class T>
struct EncoderInputs {
  std::span<const int> atomic_numbers;
  std::span<const int> src; // receiving atom i
  std::span<const int> dst; // neighbor j
  Matrix<T> rbf;            // edges x K
  Matrix<T> relpos;         // edges x 3
};

template <class T>
struct EdgeTape {
  Mlp2Tape<T> mlp;
  Matrix<T> pre; // before the outer swish
};

// e_ij = swish(MLP([rbf(d_ij); r_ij]))
template <class T>
Matrix<T> embed_edges(const BasicMlp2<T> &edge_mlp, const Matrix<T> &rbf,
                      const Matrix<T> &relpos, EdgeTape<T> *tape = nullptr);

template <class T>
struct LayerTape {
  Matrix<T> h_in;
  Matrix<T> filter_pre;    // first linear of the filter MLP
  Matrix<T> filter_hidden; // swish(filter_pre)
  Matrix<T> filter_out;    // second linear, before the outer swish
  Matrix<T> filter;        // f_ij
  Mlp2Tape<T> update;      // input is the aggregated neighbor sum
};

// f_ij = swish(MLP([e_ij; h_i; h_j]))
// h_i <- h_i + MLP(sum_j h_j * f_ij), neighbor sum in ascending j.
template <class T>
Matrix<T> message_pass(const BasicLayerParams<T> &layer, const Matrix<T> &h,
                       const Matrix<T> &e, std::span<const int> src,
                       std::span<const int> dst, LayerTape<T> *tape = nullptr);

template <class T>
struct EncodeTape {
  EdgeTape<T> edge;
  Matrix<T> edge_features;
  std::vector<LayerTape<T>> layers;
};

template <class T>
Matrix<T> encode(const BasicEncoderParams<T> &params,
                 const EncoderInputs<T> &inputs, EncodeTape<T> *tape = nullptr);

// Backpropagates d loss / d h^L through all layers, the edge embedding and
// the node embedding, accumulating into grad.
void encode_backward(const EncoderParams &params,
                     const EncoderInputs<double> &inputs,
                     const EncodeTape<double> &tape,
                     const Matrix<double> &d_h_final, EncoderParams &grad);

} // namespace ipbind

#endif // IPBIND_CORE_ENCODER_HPP_
