//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef IPBIND_CORE_CONFIG_HPP_
#define IPBIND_CORE_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "frames.hpp"

namespace ipbind {

enum class EncoderSharing { kShared, kSeparate };
enum class Framework { kDifference, kComplexOnly };
enum class Precision { kFloat32, kFloat64 };
enum class NdcgGain { kLinear, kExponential };

struct ModelConfig {
  int hidden_dim = 128;
  int num_layers = 4;
  int rbf_count = 32;
  double rbf_cutoff = 5.0;   // Angstrom
  double graph_cutoff = 5.0; // Angstrom, inclusive
  int max_residues = 50;
  FrameMode frame_mode = FrameMode::kSE3;
  EncoderSharing encoder_sharing = EncoderSharing::kShared;
  Framework framework = Framework::kDifference;
  Precision precision = Precision::kFloat64; // inference only

  // Checks invariants. Tests may set num_layers = 0 directly; files may not.
  void validate(bool allow_zero_layers = false) const;
};

struct LossConfig {
  double noise_sigma2 = 1.0; // initial value; learned as log(sigma^2)
  double rank_alpha = 1.0;
  double ndcg_temperature = 1.0; // pK units
  NdcgGain ndcg_gain = NdcgGain::kLinear;

  void validate() const;
};

struct TrainConfig {
  int epochs = 100;
  int batch_size = 16;
  double peak_lr = 0.01;
  double init_lr = 1e-6;
  int warmup_epochs = 2;
  double weight_decay = 1e-4;
  double final_lr = 0.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

struct RunConfig {
  ModelConfig model;
  LossConfig loss;
  TrainConfig train;
};

// Flat "key = value" text, '#' starts a comment. Unknown keys and malformed
// values throw UsageError; absent keys keep their defaults.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path &path);

// Canonical text form; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const RunConfig &config);

} // namespace ipbind

#endif // IPBIND_CORE_CONFIG_HPP_
