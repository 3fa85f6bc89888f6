//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>

#include "checkpoint.hpp"
#include "error.hpp"
#include "losses.hpp"
#include "metrics.hpp"

namespace ipbind {
namespace {
std::vector<double> labels_of(std::span<const PreparedComplex *const> batch) {
  std::vector<double> y;
  y.reserve(batch.size());
  for (const auto *pc : batch) {
    if (!pc->label)
      throw DataError("complex '" + pc->id + "' has no label");
    y.push_back(*pc->label);
  }
  return y;
}

std::string csv_row(int epoch, std::string_view split, const EpochMetrics &m) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%d,%.*s,%.9g,%.9g,%.9g,%.9g\n", epoch,
                static_cast<int>(split.size()), split.data(), m.loss, m.rmse,
                m.pearson, m.lr);
  return buf;
}
} // namespace

TrainState init_train_state(const RunConfig &config) {
  TrainState s;
  s.config = config;
  s.params = init_params(config.model, config.loss, config.train.seed);
  s.adam_m = zero_params(config.model);
  s.adam_v = zero_params(config.model);
  // Shuffle stream kept apart from the initialisation stream.
  s.rng = Rng(config.train.seed ^ 0x9e3779b97f4a7c15ULL);
  return s;
}

double lr_schedule(std::int64_t batch_index, std::int64_t batches_per_epoch,
                   const TrainConfig &config) {
  const std::int64_t warmup = config.warmup_epochs * batches_per_epoch;
  const std::int64_t total = config.epochs * batches_per_epoch;
  const std::int64_t b = std::max<std::int64_t>(batch_index, 0);

  if (b < warmup) {
    if (warmup == 1)
      return config.init_lr;
    const double frac = static_cast<double>(b) / static_cast<double>(warmup - 1);
    return (1.0 - frac) * config.init_lr + frac * config.peak_lr;
  }

  // Batch at which the schedule sits at peak_lr.
  const std::int64_t anchor = warmup > 0 ? warmup - 1 : 0;
  const std::int64_t span = total - 1 - anchor;
  double progress;
  if (span > 0)
    progress = std::clamp(static_cast<double>(b - anchor) /
                              static_cast<double>(span),
                          0.0, 1.0);
  else
    progress = b > anchor ? 1.0 : 0.0;
  return config.final_lr + 0.5 * (config.peak_lr - config.final_lr) *
                               (1.0 + std::cos(std::numbers::pi * progress));
}

void adamw_step(TrainState &state, const ModelParams &grad, double lr) {
  const auto &tc = state.config.train;
  ++state.global_step;
  const double t = static_cast<double>(state.global_step);
  const double bias1 = 1.0 - std::pow(tc.adam_beta1, t);
  const double bias2 = 1.0 - std::pow(tc.adam_beta2, t);

  auto params = tensors_of(state.params);
  auto m = tensors_of(state.adam_m);
  auto v = tensors_of(state.adam_v);
  auto g = tensors_of(const_cast<ModelParams &>(grad));
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double decay =
        params[k].name == "log_noise_sigma2" ? 0.0 : tc.weight_decay;
    auto p = params[k].data;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double gi = g[k].data[i];
      m[k].data[i] = tc.adam_beta1 * m[k].data[i] + (1.0 - tc.adam_beta1) * gi;
      v[k].data[i] =
          tc.adam_beta2 * v[k].data[i] + (1.0 - tc.adam_beta2) * gi * gi;
      const double m_hat = m[k].data[i] / bias1;
      const double v_hat = v[k].data[i] / bias2;
      p[i] -= lr * (m_hat / (std::sqrt(v_hat) + tc.adam_eps) + decay * p[i]);
    }
  }
}

BatchGradient batch_gradient(const ModelParams &params, const RunConfig &config,
                             std::span<const PreparedComplex *const> batch) {
  BatchGradient out;
  const auto labels = labels_of(batch);
  for (const auto *pc : batch)
    out.predictions.push_back(predict(params, config.model, *pc).affinity);

  out.loss = total_loss(out.predictions, labels, params.log_noise_sigma2,
                        config.loss);
  if (!std::isfinite(out.loss.value)) {
    std::string ids;
    for (const auto *pc : batch)
      ids += (ids.empty() ? "" : ", ") + pc->id;
    throw NumericalError("non-finite training loss on batch [" + ids + "]");
  }

  out.grad = zero_params(config.model);
  for (std::size_t i = 0; i < batch.size(); ++i)
    accumulate_affinity_gradient(params, config.model, *batch[i],
                                 out.loss.d_predictions[i], out.grad);
  out.grad.log_noise_sigma2 = out.loss.d_log_noise_sigma2;
  return out;
}

EpochMetrics train_epoch(TrainState &state,
                         std::span<const PreparedComplex> data) {
  if (data.empty())
    throw DataError("train_epoch: empty training split");
  const auto &tc = state.config.train;
  const std::size_t n = data.size();
  const auto bs = static_cast<std::size_t>(tc.batch_size);
  const auto batches_per_epoch = static_cast<std::int64_t>((n + bs - 1) / bs);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  state.rng.shuffle(order);

  EpochMetrics metrics;
  std::vector<double> preds, labels;
  double loss_sum = 0.0;
  for (std::size_t start = 0; start < n; start += bs) {
    std::vector<const PreparedComplex *> batch;
    for (std::size_t k = start; k < std::min(n, start + bs); ++k)
      batch.push_back(&data[order[k]]);

    const double lr = lr_schedule(state.global_step, batches_per_epoch, tc);
    auto bg = batch_gradient(state.params, state.config, batch);
    adamw_step(state, bg.grad, lr);
    if (!all_finite(state.params))
      throw NumericalError("non-finite parameters after update on batch "
                           "starting with '" + batch.front()->id + "'");

    loss_sum += bg.loss.value * static_cast<double>(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      preds.push_back(bg.predictions[i]);
      labels.push_back(*batch[i]->label);
    }
    metrics.lr = lr;
  }
  ++state.epoch;

  const auto report = compute_metrics(preds, labels);
  metrics.loss = loss_sum / static_cast<double>(n);
  metrics.rmse = report.rmse;
  metrics.pearson = report.pearson;
  metrics.n = n;
  return metrics;
}

EvalResult evaluate(const ModelParams &params, const RunConfig &config,
                    std::span<const PreparedComplex> data) {
  if (data.empty())
    throw DataError("evaluate: empty split");
  EvalResult out;
  std::vector<const PreparedComplex *> all;
  for (const auto &pc : data) {
    all.push_back(&pc);
    out.predictions.push_back(predict(params, config.model, pc).affinity);
  }
  const auto labels = labels_of(all);
  const auto loss = total_loss(out.predictions, labels,
                               params.log_noise_sigma2, config.loss);
  const auto report = compute_metrics(out.predictions, labels);
  out.metrics.loss = loss.value;
  out.metrics.rmse = report.rmse;
  out.metrics.pearson = report.pearson;
  out.metrics.n = data.size();
  return out;
}

std::vector<PreparedComplex>
prepare_split(const DatasetManifest &manifest, Split split,
              const ModelConfig &config) {
  std::vector<PreparedComplex> out;
  for (const auto *entry : manifest.select(split)) {
    const auto pc = load_entry(*entry, config.max_residues);
    out.push_back(prepare_complex(pc, config, entry->id));
  }
  return out;
}

FitResult fit(const DatasetManifest &manifest, const RunConfig &config,
              const std::filesystem::path &out_dir,
              const std::optional<std::filesystem::path> &resume_from) {
  TrainState state =
      resume_from ? load_checkpoint(*resume_from) : init_train_state(config);
  if (resume_from) {
    // Keep the run length from the new config so a run can be extended.
    state.config.train.epochs = config.train.epochs;
  }
  const auto &rc = state.config;

  const auto train = prepare_split(manifest, Split::kTrain, rc.model);
  const auto val = prepare_split(manifest, Split::kVal, rc.model);
  if (train.empty())
    throw DataError("fit: manifest has no train entries");
  if (val.empty())
    throw DataError("fit: manifest has no val entries");

  std::filesystem::create_directories(out_dir);
  FitResult result;
  if (resume_from)
    result.best_checkpoint = *resume_from;
  result.metrics_csv = out_dir / "metrics.csv";
  const bool append =
      resume_from.has_value() && std::filesystem::exists(result.metrics_csv);
  std::ofstream csv(result.metrics_csv,
                    append ? std::ios::app : std::ios::trunc);
  if (!csv)
    throw DataError("cannot write '" + result.metrics_csv.string() + "'");
  if (!append)
    csv << "epoch,split,loss,rmse,pearson,lr\n";

  while (state.epoch < rc.train.epochs) {
    auto train_metrics = train_epoch(state, train);
    auto val_result = evaluate(state.params, rc, val);
    val_result.metrics.lr = train_metrics.lr;
    csv << csv_row(state.epoch, "train", train_metrics)
        << csv_row(state.epoch, "val", val_result.metrics);
    csv.flush();

    const double p = val_result.metrics.pearson;
    const bool improved = !state.has_best || p > state.best_val_pearson ||
                          (std::isnan(state.best_val_pearson) && !std::isnan(p));
    if (improved) {
      state.has_best = true;
      state.best_val_pearson = p;
      char name[64];
      std::snprintf(name, sizeof name, "checkpoint_epoch%04d.ipbc",
                    state.epoch);
      const auto path = out_dir / name;
      save_checkpoint(state, path);
      result.checkpoints.push_back(path);
      result.best_checkpoint = path;
    }
  }
  return result;
}

} // namespace ipbind
