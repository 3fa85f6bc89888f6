//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef IPBIND_CORE_METRICS_HPP_
#define IPBIND_CORE_METRICS_HPP_

#include <cstddef>
#include <span>

namespace ipbind {

struct MetricReport {
  double rmse = 0.0;
  double pearson = 0.0; // NaN when undefined
  std::size_t n = 0;
};

// Throws UsageError on empty input or a length mismatch.
double metric_rmse(std::span<const double> predictions,
                   std::span<const double> labels);

// Product-moment correlation. Throws UsageError for length problems
// (mismatch, fewer than 2) and NumericalError when either side is constant.
double metric_pearson(std::span<const double> predictions,
                      std::span<const double> labels);

// Never throws on constant inputs; pearson is NaN when undefined.
MetricReport compute_metrics(std::span<const double> predictions,
                             std::span<const double> labels);

} // namespace ipbind

#endif // IPBIND_CORE_METRICS_HPP_
