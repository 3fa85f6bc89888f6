//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "losses.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "error.hpp"

namespace ipbind {
namespace {
void check_batch(std::span<const double> predictions,
                 std::span<const double> labels) {
  if (predictions.empty())
    throw UsageError("loss: empty batch");
  if (predictions.size() != labels.size())
    throw UsageError("loss: prediction and label counts differ");
}

double sigmoid(double x) {
  if (x >= 0)
    return 1.0 / (1.0 + std::exp(-x));
  const double z = std::exp(x);
  return z / (1.0 + z);
}
} // namespace

LossValue balanced_mse(std::span<const double> predictions,
                       std::span<const double> labels,
                       double log_noise_sigma2) {
  check_batch(predictions, labels);
  const std::size_t b = predictions.size();
  const double inv_two_var = 0.5 * std::exp(-log_noise_sigma2);

  LossValue out;
  out.d_predictions.assign(b, 0.0);
  std::vector<double> logits(b), probs(b);
  for (std::size_t i = 0; i < b; ++i) {
    double max_logit = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b; ++j) {
      const double diff = predictions[i] - labels[j];
      logits[j] = -diff * diff * inv_two_var;
      max_logit = std::max(max_logit, logits[j]);
    }
    double z = 0.0;
    for (std::size_t j = 0; j < b; ++j) {
      probs[j] = std::exp(logits[j] - max_logit);
      z += probs[j];
    }
    const double lse = max_logit + std::log(z);
    out.value += lse - logits[i];

    // d logit_ij / d pred_i = -(pred_i - y_j) / sigma^2
    // d logit_ij / d log sigma^2 = -logit_ij
    double d_pred = (predictions[i] - labels[i]) * 2.0 * inv_two_var;
    double d_log_var = logits[i];
    for (std::size_t j = 0; j < b; ++j) {
      const double p = probs[j] / z;
      d_pred -= p * (predictions[i] - labels[j]) * 2.0 * inv_two_var;
      d_log_var -= p * logits[j];
    }
    out.d_predictions[i] = d_pred / static_cast<double>(b);
    out.d_log_noise_sigma2 += d_log_var;
  }
  out.value /= static_cast<double>(b);
  out.d_log_noise_sigma2 /= static_cast<double>(b);
  return out;
}

NdcgValue approx_ndcg(std::span<const double> predictions,
                      std::span<const double> labels, double temperature,
                      NdcgGain gain_kind) {
  check_batch(predictions, labels);
  if (!(temperature > 0.0))
    throw UsageError("approx_ndcg: temperature must be positive");
  const std::size_t b = predictions.size();

  NdcgValue out;
  out.d_predictions.assign(b, 0.0);
  const double min_label = *std::min_element(labels.begin(), labels.end());
  std::vector<double> gains(b);
  for (std::size_t i = 0; i < b; ++i) {
    const double shifted = labels[i] - min_label;
    gains[i] = gain_kind == NdcgGain::kLinear ? shifted
                                              : std::exp2(shifted) - 1.0;
  }

  std::vector<double> ideal = gains;
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double idcg = 0.0;
  for (std::size_t k = 0; k < b; ++k)
    idcg += ideal[k] / std::log2(static_cast<double>(k) + 2.0);
  if (!(idcg > 0.0))
    return out;

  std::vector<double> rank(b, 1.0);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      if (j != i)
        rank[i] += sigmoid((predictions[j] - predictions[i]) / temperature);
    }
  }

  double dcg = 0.0;
  std::vector<double> d_rank(b);
  for (std::size_t i = 0; i < b; ++i) {
    const double lg = std::log2(1.0 + rank[i]);
    dcg += gains[i] / lg;
    d_rank[i] = -gains[i] / (lg * lg * (1.0 + rank[i]) * std::numbers::ln2);
  }
  out.ndcg = dcg / idcg;

  // rank_i depends on p_i (negatively) and each p_j (positively).
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      if (j == i)
        continue;
      const double s = sigmoid((predictions[j] - predictions[i]) / temperature);
      const double ds = s * (1.0 - s) / temperature;
      out.d_predictions[j] += d_rank[i] * ds / idcg;
      out.d_predictions[i] -= d_rank[i] * ds / idcg;
    }
  }
  return out;
}

double rank_loss(double ndcg, double alpha) {
  const double x = alpha * (1.0 - ndcg);
  return std::expm1(x) - x;
}

double rank_loss_grad(double ndcg, double alpha) {
  const double x = alpha * (1.0 - ndcg);
  return -alpha * std::expm1(x);
}

TotalLoss total_loss(std::span<const double> predictions,
                     std::span<const double> labels, double log_noise_sigma2,
                     const LossConfig &config) {
  check_batch(predictions, labels);
  const auto bmse = balanced_mse(predictions, labels, log_noise_sigma2);

  TotalLoss out;
  out.balanced_mse = bmse.value;
  out.d_predictions = bmse.d_predictions;
  out.d_log_noise_sigma2 = bmse.d_log_noise_sigma2;
  if (predictions.size() >= 2) {
    const auto nd = approx_ndcg(predictions, labels, config.ndcg_temperature,
                                config.ndcg_gain);
    out.ndcg = nd.ndcg;
    out.rank = rank_loss(nd.ndcg, config.rank_alpha);
    const double g = rank_loss_grad(nd.ndcg, config.rank_alpha);
    for (std::size_t i = 0; i < predictions.size(); ++i)
      out.d_predictions[i] += g * nd.d_predictions[i];
  }
  out.value = out.balanced_mse + out.rank;
  return out;
}

} // namespace ipbind
