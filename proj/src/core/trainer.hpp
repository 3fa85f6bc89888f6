//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef IPBIND_CORE_TRAINER_HPP_
#define IPBIND_CORE_TRAINER_HPP_

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "config.hpp"
#include "head.hpp"
#include "losses.hpp"
#include "params.hpp"
#include "rng.hpp"
#include "structio.hpp"

namespace ipbind {

struct TrainState {
  RunConfig config;
  ModelParams params;
  ModelParams adam_m; // first moments
  ModelParams adam_v; // second moments
  std::int64_t global_step = 0;
  int epoch = 0; // completed epochs
  bool has_best = false;
  double best_val_pearson = -std::numeric_limits<double>::infinity();
  Rng rng;
};

TrainState init_train_state(const RunConfig &config);

// Linear warm-up from init_lr to peak_lr over the first warmup_epochs
// epochs (both endpoints hit exactly), then cosine decay to final_lr at the
// last batch of the run.
double lr_schedule(std::int64_t batch_index, std::int64_t batches_per_epoch,
                   const TrainConfig &config);

// One decoupled-weight-decay Adam step; log_noise_sigma2 is not decayed.
void adamw_step(TrainState &state, const ModelParams &grad, double lr);

struct EpochMetrics {
  double loss = 0.0;
  double rmse = 0.0;
  double pearson = 0.0;
  double lr = 0.0; // at the last batch
  std::size_t n = 0;
};

struct BatchGradient {
  TotalLoss loss;
  std::vector<double> predictions;
  ModelParams grad;
};

// Loss and full parameter gradient for one batch (training precision).
BatchGradient batch_gradient(const ModelParams &params, const RunConfig &config,
                             std::span<const PreparedComplex *const> batch);

// Seeded shuffle, then one optimizer step per batch. Every complex must be
// labelled. Throws NumericalError naming the complex on a non-finite loss.
EpochMetrics train_epoch(TrainState &state,
                         std::span<const PreparedComplex> data);

struct EvalResult {
  std::vector<double> predictions;
  EpochMetrics metrics;
};

EvalResult evaluate(const ModelParams &params, const RunConfig &config,
                    std::span<const PreparedComplex> data);

std::vector<PreparedComplex>
prepare_split(const DatasetManifest &manifest, Split split,
              const ModelConfig &config);

struct FitResult {
  std::filesystem::path best_checkpoint;
  std::vector<std::filesystem::path> checkpoints;
  std::filesystem::path metrics_csv;
};

// Trains on the train split, tracks validation Pearson, writes a
// checkpoint on every improvement plus metrics.csv
// ("epoch,split,loss,rmse,pearson,lr"). With resume_from, continues from
// that checkpoint's epoch and schedule position.
FitResult fit(const DatasetManifest &manifest, const RunConfig &config,
              const std::filesystem::path &out_dir,
              const std::optional<std::filesystem::path> &resume_from = {});

} // namespace ipbind

#endif // IPBIND_CORE_TRAINER_HPP_
