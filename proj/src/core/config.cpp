//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "config.hpp"

#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include "error.hpp"
#include "structio.hpp"
#include "text_util.hpp"

namespace ipbind {
namespace {
using internal::parse_number;
using internal::trim;

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw UsageError("config: invalid value '" + std::string(value) +
                   "' for key '" + std::string(key) + "'");
}

template <class T>
T number(std::string_view key, std::string_view value) {
  auto v = parse_number<T>(value);
  if (!v)
    bad_value(key, value);
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(*v))
      bad_value(key, value);
  }
  return *v;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void require(bool cond, const char *msg) {
  if (!cond)
    throw UsageError(std::string("config: ") + msg);
}

using Setter = std::function<void(RunConfig &, std::string_view)>;

const std::map<std::string, Setter, std::less<>> &setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
    { "hidden_dim",
      [](RunConfig &c, std::string_view v) {
        c.model.hidden_dim = number<int>("hidden_dim", v);
      } },
    { "num_layers",
      [](RunConfig &c, std::string_view v) {
        c.model.num_layers = number<int>("num_layers", v);
      } },
    { "rbf_count",
      [](RunConfig &c, std::string_view v) {
        c.model.rbf_count = number<int>("rbf_count", v);
      } },
    { "rbf_cutoff",
      [](RunConfig &c, std::string_view v) {
        c.model.rbf_cutoff = number<double>("rbf_cutoff", v);
      } },
    { "graph_cutoff",
      [](RunConfig &c, std::string_view v) {
        c.model.graph_cutoff = number<double>("graph_cutoff", v);
      } },
    { "max_residues",
      [](RunConfig &c, std::string_view v) {
        c.model.max_residues = number<int>("max_residues", v);
      } },
    { "frame_mode",
      [](RunConfig &c, std::string_view v) {
        if (v == "SE3")
          c.model.frame_mode = FrameMode::kSE3;
        else if (v == "E3")
          c.model.frame_mode = FrameMode::kE3;
        else if (v == "NONE")
          c.model.frame_mode = FrameMode::kNone;
        else
          bad_value("frame_mode", v);
      } },
    { "encoder_sharing",
      [](RunConfig &c, std::string_view v) {
        if (v == "shared")
          c.model.encoder_sharing = EncoderSharing::kShared;
        else if (v == "separate")
          c.model.encoder_sharing = EncoderSharing::kSeparate;
        else
          bad_value("encoder_sharing", v);
      } },
    { "framework",
      [](RunConfig &c, std::string_view v) {
        if (v == "difference")
          c.model.framework = Framework::kDifference;
        else if (v == "complex_only")
          c.model.framework = Framework::kComplexOnly;
        else
          bad_value("framework", v);
      } },
    { "precision",
      [](RunConfig &c, std::string_view v) {
        if (v == "float32")
          c.model.precision = Precision::kFloat32;
        else if (v == "float64")
          c.model.precision = Precision::kFloat64;
        else
          bad_value("precision", v);
      } },
    { "noise_sigma2",
      [](RunConfig &c, std::string_view v) {
        c.loss.noise_sigma2 = number<double>("noise_sigma2", v);
      } },
    { "rank_alpha",
      [](RunConfig &c, std::string_view v) {
        c.loss.rank_alpha = number<double>("rank_alpha", v);
      } },
    { "ndcg_temperature",
      [](RunConfig &c, std::string_view v) {
        c.loss.ndcg_temperature = number<double>("ndcg_temperature", v);
      } },
    { "ndcg_gain",
      [](RunConfig &c, std::string_view v) {
        if (v == "linear")
          c.loss.ndcg_gain = NdcgGain::kLinear;
        else if (v == "exponential")
          c.loss.ndcg_gain = NdcgGain::kExponential;
        else
          bad_value("ndcg_gain", v);
      } },
    { "epochs",
      [](RunConfig &c, std::string_view v) {
        c.train.epochs = number<int>("epochs", v);
      } },
    { "batch_size",
      [](RunConfig &c, std::string_view v) {
        c.train.batch_size = number<int>("batch_size", v);
      } },
    { "peak_lr",
      [](RunConfig &c, std::string_view v) {
        c.train.peak_lr = number<double>("peak_lr", v);
      } },
    { "init_lr",
      [](RunConfig &c, std::string_view v) {
        c.train.init_lr = number<double>("init_lr", v);
      } },
    { "warmup_epochs",
      [](RunConfig &c, std::string_view v) {
        c.train.warmup_epochs = number<int>("warmup_epochs", v);
      } },
    { "weight_decay",
      [](RunConfig &c, std::string_view v) {
        c.train.weight_decay = number<double>("weight_decay", v);
      } },
    { "final_lr",
      [](RunConfig &c, std::string_view v) {
        c.train.final_lr = number<double>("final_lr", v);
      } },
    { "adam_beta1",
      [](RunConfig &c, std::string_view v) {
        c.train.adam_beta1 = number<double>("adam_beta1", v);
      } },
    { "adam_beta2",
      [](RunConfig &c, std::string_view v) {
        c.train.adam_beta2 = number<double>("adam_beta2", v);
      } },
    { "adam_eps",
      [](RunConfig &c, std::string_view v) {
        c.train.adam_eps = number<double>("adam_eps", v);
      } },
    { "seed",
      [](RunConfig &c, std::string_view v) {
        c.train.seed = number<std::uint64_t>("seed", v);
      } },
  };
  return table;
}
} // namespace

void ModelConfig::validate(bool allow_zero_layers) const {
  require(hidden_dim > 0, "hidden_dim must be positive");
  require(allow_zero_layers ? num_layers >= 0 : num_layers >= 1,
          "num_layers must be at least 1");
  require(rbf_count >= 2, "rbf_count must be at least 2");
  require(rbf_cutoff > 0.0, "rbf_cutoff must be positive");
  require(graph_cutoff > 0.0, "graph_cutoff must be positive");
  require(max_residues >= 1, "max_residues must be positive");
}

void LossConfig::validate() const {
  require(noise_sigma2 > 0.0, "noise_sigma2 must be positive");
  require(rank_alpha > 0.0, "rank_alpha must be positive");
  require(ndcg_temperature > 0.0, "ndcg_temperature must be positive");
}

void TrainConfig::validate() const {
  require(epochs >= 1, "epochs must be at least 1");
  require(batch_size >= 1, "batch_size must be at least 1");
  require(init_lr > 0.0 && init_lr <= peak_lr,
          "learning rates must satisfy 0 < init_lr <= peak_lr");
  require(final_lr >= 0.0, "final_lr must be non-negative");
  require(warmup_epochs >= 0 && warmup_epochs < epochs,
          "warmup_epochs must satisfy 0 <= warmup_epochs < epochs");
  require(weight_decay >= 0.0, "weight_decay must be non-negative");
  require(adam_beta1 >= 0.0 && adam_beta1 < 1.0, "adam_beta1 out of range");
  require(adam_beta2 >= 0.0 && adam_beta2 < 1.0, "adam_beta2 out of range");
  require(adam_eps > 0.0, "adam_eps must be positive");
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  const auto lines = internal::split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    auto line = lines[li];
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw UsageError("config line " + std::to_string(li + 1) +
                       ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    auto it = setters().find(key);
    if (it == setters().end())
      throw UsageError("config line " + std::to_string(li + 1) +
                       ": unknown key '" + std::string(key) + "'");
    it->second(config, value);
  }
  config.model.validate();
  config.loss.validate();
  config.train.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path &path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const DataError &) {
    throw UsageError("cannot read config file '" + path.string() + "'");
  }
  return parse_config(text);
}

std::string serialize_config(const RunConfig &c) {
  std::ostringstream os;
  os << "# model\n";
  os << "hidden_dim = " << c.model.hidden_dim << "\n";
  os << "num_layers = " << c.model.num_layers << "\n";
  os << "rbf_count = " << c.model.rbf_count << "\n";
  os << "rbf_cutoff = " << fmt_double(c.model.rbf_cutoff) << "  # Angstrom\n";
  os << "graph_cutoff = " << fmt_double(c.model.graph_cutoff)
     << "  # Angstrom, inclusive\n";
  os << "max_residues = " << c.model.max_residues << "\n";
  os << "frame_mode = " << frame_mode_name(c.model.frame_mode) << "\n";
  os << "encoder_sharing = "
     << (c.model.encoder_sharing == EncoderSharing::kShared ? "shared"
                                                            : "separate")
     << "\n";
  os << "framework = "
     << (c.model.framework == Framework::kDifference ? "difference"
                                                     : "complex_only")
     << "\n";
  os << "precision = "
     << (c.model.precision == Precision::kFloat32 ? "float32" : "float64")
     << "\n";
  os << "# loss\n";
  os << "noise_sigma2 = " << fmt_double(c.loss.noise_sigma2) << "  # pK^2\n";
  os << "rank_alpha = " << fmt_double(c.loss.rank_alpha) << "\n";
  os << "ndcg_temperature = " << fmt_double(c.loss.ndcg_temperature)
     << "  # pK\n";
  os << "ndcg_gain = "
     << (c.loss.ndcg_gain == NdcgGain::kLinear ? "linear" : "exponential")
     << "\n";
  os << "# training\n";
  os << "epochs = " << c.train.epochs << "\n";
  os << "batch_size = " << c.train.batch_size << "\n";
  os << "peak_lr = " << fmt_double(c.train.peak_lr) << "\n";
  os << "init_lr = " << fmt_double(c.train.init_lr) << "\n";
  os << "warmup_epochs = " << c.train.warmup_epochs << "\n";
  os << "weight_decay = " << fmt_double(c.train.weight_decay) << "\n";
  os << "final_lr = " << fmt_double(c.train.final_lr) << "\n";
  os << "adam_beta1 = " << fmt_double(c.train.adam_beta1) << "\n";
  os << "adam_beta2 = " << fmt_double(c.train.adam_beta2) << "\n";
  os << "adam_eps = " << fmt_double(c.train.adam_eps) << "\n";
  os << "seed = " << c.train.seed << "\n";
  return os.str();
}

} // namespace ipbind
