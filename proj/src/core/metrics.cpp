//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "metrics.hpp"

#include <cmath>
#include <limits>

#include "error.hpp"

namespace ipbind {

double metric_rmse(std::span<const double> predictions,
                   std::span<const double> labels) {
  if (predictions.size() != labels.size())
    throw UsageError("rmse: prediction and label counts differ");
  if (predictions.empty())
    throw UsageError("rmse: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - labels[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(predictions.size()));
}

double metric_pearson(std::span<const double> predictions,
                      std::span<const double> labels) {
  if (predictions.size() != labels.size())
    throw UsageError("pearson: prediction and label counts differ");
  if (predictions.size() < 2)
    throw UsageError("pearson: needs at least 2 values");
  const auto n = static_cast<double>(predictions.size());
  double mp = 0.0, ml = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    mp += predictions[i];
    ml += labels[i];
  }
  mp /= n;
  ml /= n;
  double cov = 0.0, vp = 0.0, vl = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double a = predictions[i] - mp;
    const double b = labels[i] - ml;
    cov += a * b;
    vp += a * a;
    vl += b * b;
  }
  if (vp == 0.0 || vl == 0.0)
    throw NumericalError("pearson: undefined for a constant vector");
  return cov / std::sqrt(vp * vl);
}

MetricReport compute_metrics(std::span<const double> predictions,
                             std::span<const double> labels) {
  MetricReport r;
  r.n = predictions.size();
  r.rmse = metric_rmse(predictions, labels);
  try {
    r.pearson = metric_pearson(predictions, labels);
  } catch (const Error &) {
    r.pearson = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

} // namespace ipbind
