//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "encoder.hpp"

#include <cmath>
#include <string>

#include "error.hpp"
#include "structio.hpp"

namespace ipbind {
namespace {
template <class T>
T sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

// out.row(index[k]) += rows.row(k)
template <class T>
void scatter_add(Matrix<T> &out, const Matrix<T> &rows,
                 std::span<const int> index) {
  for (Eigen::Index k = 0; k < rows.rows(); ++k)
    out.row(index[k]) += rows.row(k);
}

template <class T>
Matrix<T> gather(const Matrix<T> &nodes, std::span<const int> index) {
  Matrix<T> out(static_cast<Eigen::Index>(index.size()), nodes.cols());
  for (std::size_t k = 0; k < index.size(); ++k)
    out.row(static_cast<Eigen::Index>(k)) = nodes.row(index[k]);
  return out;
}

template <class T>
Matrix<T> linear(const Matrix<T> &x, const Matrix<T> &w, const Vector<T> &b) {
  Matrix<T> y = x * w.transpose();
  y.rowwise() += b.transpose();
  return y;
}
} // namespace

template <class T>
Matrix<T> swish(const Matrix<T> &x) {
  return x.unaryExpr([](T v) { return v * sigmoid(v); });
}

template <class T>
Matrix<T> swish_grad(const Matrix<T> &x) {
  return x.unaryExpr([](T v) {
    const T s = sigmoid(v);
    return s + v * s * (T(1) - s);
  });
}

template <class T>
Matrix<T> mlp2_forward(const BasicMlp2<T> &mlp, const Matrix<T> &x,
                       Mlp2Tape<T> *tape) {
  Matrix<T> pre = linear(x, mlp.w1, mlp.b1);
  Matrix<T> hidden = swish(pre);
  Matrix<T> out = linear(hidden, mlp.w2, mlp.b2);
  if (tape) {
    tape->input = x;
    tape->pre = std::move(pre);
    tape->hidden = std::move(hidden);
  }
  return out;
}

Matrix<double> mlp2_backward(const Mlp2 &mlp, const Mlp2Tape<double> &tape,
                             const Matrix<double> &d_out, Mlp2 &grad,
                             bool want_input_grad) {
  grad.w2.noalias() += d_out.transpose() * tape.hidden;
  grad.b2 += d_out.colwise().sum().transpose();
  Matrix<double> d_pre =
      (d_out * mlp.w2).cwiseProduct(swish_grad(tape.pre));
  grad.w1.noalias() += d_pre.transpose() * tape.input;
  grad.b1 += d_pre.colwise().sum().transpose();
  if (!want_input_grad)
    return {};
  return d_pre * mlp.w1;
}

template <class T>
Matrix<T> embed_nodes(const Matrix<T> &table,
                      std::span<const int> atomic_numbers) {
  Matrix<T> h(static_cast<Eigen::Index>(atomic_numbers.size()), table.cols());
  for (std::size_t i = 0; i < atomic_numbers.size(); ++i) {
    const int z = atomic_numbers[i];
    if (z < 1 || z > kMaxAtomicNumber || z >= table.rows())
      throw DataError("embed_nodes: atomic number " + std::to_string(z) +
                      " out of range");
    h.row(static_cast<Eigen::Index>(i)) = table.row(z);
  }
  return h;
}

Vector<double> rbf_expand(double distance, int count, double cutoff) {
  Vector<double> out(count);
  const double gamma = cutoff / (count - 1);
  for (int k = 0; k < count; ++k) {
    const double mu = cutoff * k / (count - 1);
    const double x = distance - mu;
    out[k] = std::exp(-(x * x) / (2.0 * gamma * gamma));
  }
  return out;
}

Matrix<double> rbf_expand(const Vector<double> &distances, int count,
                          double cutoff) {
  Matrix<double> out(distances.size(), count);
  for (Eigen::Index e = 0; e < distances.size(); ++e)
    out.row(e) = rbf_expand(distances[e], count, cutoff).transpose();
  return out;
}

template <class T>
Matrix<T> embed_edges(const BasicMlp2<T> &edge_mlp, const Matrix<T> &rbf,
                      const Matrix<T> &relpos, EdgeTape<T> *tape) {
  Matrix<T> x(rbf.rows(), rbf.cols() + 3);
  x.leftCols(rbf.cols()) = rbf;
  x.rightCols(3) = relpos;
  Matrix<T> pre = mlp2_forward(edge_mlp, x, tape ? &tape->mlp : nullptr);
  Matrix<T> e = swish(pre);
  if (tape)
    tape->pre = std::move(pre);
  return e;
}

template <class T>
Matrix<T> message_pass(const BasicLayerParams<T> &layer, const Matrix<T> &h,
                       const Matrix<T> &e, std::span<const int> src,
                       std::span<const int> dst, LayerTape<T> *tape) {
  const Eigen::Index d = h.cols();
  const Eigen::Index m = e.rows();
  const auto &w1 = layer.filter.w1;

  // First filter linear on [e_ij; h_i; h_j], split by input block so the
  // node terms are computed once per node.
  Matrix<T> pre = e * w1.leftCols(d).transpose();
  const Matrix<T> from_i = h * w1.middleCols(d, d).transpose();
  const Matrix<T> from_j = h * w1.rightCols(d).transpose();
  for (Eigen::Index k = 0; k < m; ++k)
    pre.row(k) += from_i.row(src[k]) + from_j.row(dst[k]) +
                  layer.filter.b1.transpose();
  Matrix<T> hidden = swish(pre);
  Matrix<T> out = linear(hidden, layer.filter.w2, layer.filter.b2);
  Matrix<T> filter = swish(out);

  // Edges are sorted by (i, j), so this accumulates in ascending j.
  Matrix<T> agg = Matrix<T>::Zero(h.rows(), d);
  for (Eigen::Index k = 0; k < m; ++k)
    agg.row(src[k]) += h.row(dst[k]).cwiseProduct(filter.row(k));

  Matrix<T> h_next =
      h + mlp2_forward(layer.update, agg, tape ? &tape->update : nullptr);
  if (tape) {
    tape->h_in = h;
    tape->filter_pre = std::move(pre);
    tape->filter_hidden = std::move(hidden);
    tape->filter_out = std::move(out);
    tape->filter = std::move(filter);
  }
  return h_next;
}

template <class T>
Matrix<T> encode(const BasicEncoderParams<T> &params,
                 const EncoderInputs<T> &inputs, EncodeTape<T> *tape) {
  Matrix<T> h = embed_nodes(params.embedding, inputs.atomic_numbers);
  Matrix<T> e = embed_edges(params.edge, inputs.rbf, inputs.relpos,
                            tape ? &tape->edge : nullptr);
  if (tape)
    tape->layers.resize(params.layers.size());
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    h = message_pass(params.layers[l], h, e, inputs.src, inputs.dst,
                     tape ? &tape->layers[l] : nullptr);
  }
  if (tape)
    tape->edge_features = std::move(e);
  return h;
}

void encode_backward(const EncoderParams &params,
                     const EncoderInputs<double> &inputs,
                     const EncodeTape<double> &tape,
                     const Matrix<double> &d_h_final, EncoderParams &grad) {
  const Eigen::Index d = params.embedding.cols();
  const auto &e = tape.edge_features;
  Matrix<double> d_h = d_h_final;
  Matrix<double> d_e = Matrix<double>::Zero(e.rows(), e.cols());

  for (std::size_t li = params.layers.size(); li-- > 0;) {
    const auto &layer = params.layers[li];
    const auto &lt = tape.layers[li];
    auto &g = grad.layers[li];

    // Residual path keeps d_h; the update MLP adds its own contribution.
    const Matrix<double> d_agg = mlp2_backward(layer.update, lt.update, d_h,
                                               g.update);
    const Matrix<double> d_msg = gather(d_agg, inputs.src);
    const Matrix<double> h_j = gather(lt.h_in, inputs.dst);
    const Matrix<double> d_filter = d_msg.cwiseProduct(h_j);
    scatter_add(d_h, Matrix<double>(d_msg.cwiseProduct(lt.filter)),
                inputs.dst);

    const Matrix<double> d_out =
        d_filter.cwiseProduct(swish_grad(lt.filter_out));
    g.filter.w2.noalias() += d_out.transpose() * lt.filter_hidden;
    g.filter.b2 += d_out.colwise().sum().transpose();
    const Matrix<double> d_pre = (d_out * layer.filter.w2)
                                     .cwiseProduct(swish_grad(lt.filter_pre));
    g.filter.b1 += d_pre.colwise().sum().transpose();

    const auto &w1 = layer.filter.w1;
    g.filter.w1.leftCols(d).noalias() += d_pre.transpose() * e;
    d_e.noalias() += d_pre * w1.leftCols(d);

    Matrix<double> d_pre_by_i = Matrix<double>::Zero(lt.h_in.rows(), d);
    Matrix<double> d_pre_by_j = Matrix<double>::Zero(lt.h_in.rows(), d);
    scatter_add(d_pre_by_i, d_pre, inputs.src);
    scatter_add(d_pre_by_j, d_pre, inputs.dst);
    g.filter.w1.middleCols(d, d).noalias() += d_pre_by_i.transpose() * lt.h_in;
    g.filter.w1.rightCols(d).noalias() += d_pre_by_j.transpose() * lt.h_in;
    d_h.noalias() += d_pre_by_i * w1.middleCols(d, d);
    d_h.noalias() += d_pre_by_j * w1.rightCols(d);
  }

  const Matrix<double> d_edge_pre = d_e.cwiseProduct(swish_grad(tape.edge.pre));
  mlp2_backward(params.edge, tape.edge.mlp, d_edge_pre, grad.edge, false);

  for (std::size_t i = 0; i < inputs.atomic_numbers.size(); ++i)
    grad.embedding.row(inputs.atomic_numbers[i]) +=
        d_h.row(static_cast<Eigen::Index>(i));
}

#define IPBIND_INSTANTIATE(T)                                                  \
  template Matrix<T> swish(const Matrix<T> &);                                 \
  template Matrix<T> swish_grad(const Matrix<T> &);                            \
  template Matrix<T> mlp2_forward(const BasicMlp2<T> &, const Matrix<T> &,     \
                                  Mlp2Tape<T> *);                              \
  template Matrix<T> embed_nodes(const Matrix<T> &, std::span<const int>);     \
  template Matrix<T> embed_edges(const BasicMlp2<T> &, const Matrix<T> &,      \
                                 const Matrix<T> &, EdgeTape<T> *);            \
  template Matrix<T> message_pass(const BasicLayerParams<T> &,                 \
                                  const Matrix<T> &, const Matrix<T> &,        \
                                  std::span<const int>, std::span<const int>,  \
                                  LayerTape<T> *);                             \
  template Matrix<T> encode(const BasicEncoderParams<T> &,                     \
                            const EncoderInputs<T> &, EncodeTape<T> *);

IPBIND_INSTANTIATE(float)
IPBIND_INSTANTIATE(double)

#undef IPBIND_INSTANTIATE

} // namespace ipbind
