//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef IPBIND_CORE_LOSSES_HPP_
#define IPBIND_CORE_LOSSES_HPP_

#include <span>
#include <vector>

#include "config.hpp"

namespace ipbind {

struct LossValue {
  double value = 0.0;
  std::vector<double> d_predictions; // d value / d y_pred
  double d_log_noise_sigma2 = 0.0;
};

// Batch estimator of the balanced MSE: mean_i of
//   -log softmax_j( -(pred_i - label_j)^2 / (2 sigma^2) )[j = i]
// with sigma^2 = exp(log_noise_sigma2).
LossValue balanced_mse(std::span<const double> predictions,
                       std::span<const double> labels,
                       double log_noise_sigma2);

struct NdcgValue {
  double ndcg = 1.0;
  std::vector<double> d_predictions;
};

// Smooth-rank NDCG with rank_i = 1 + sum_{j != i} sigmoid((p_j - p_i) / tau).
// Gains are labels shifted by the batch minimum (or 2^shifted - 1 for
// exponential gains). All-equal labels give 1.
NdcgValue approx_ndcg(std::span<const double> predictions,
                      std::span<const double> labels, double temperature,
                      NdcgGain gain = NdcgGain::kLinear);

// exp(a (1 - ndcg)) - 1 - a (1 - ndcg)
double rank_loss(double ndcg, double alpha);
double rank_loss_grad(double ndcg, double alpha); // d / d ndcg

struct TotalLoss {
  double value = 0.0;
  double balanced_mse = 0.0;
  double rank = 0.0;
  double ndcg = 1.0;
  std::vector<double> d_predictions;
  double d_log_noise_sigma2 = 0.0;
};

// Balanced MSE plus the amplified rank loss; the rank term is 0 when B = 1.
TotalLoss total_loss(std::span<const double> predictions,
                     std::span<const double> labels, double log_noise_sigma2,
                     const LossConfig &config);

} // namespace ipbind

#endif // IPBIND_CORE_LOSSES_HPP_
