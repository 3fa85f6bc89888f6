//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ipbind/ipbind.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

struct ModelDeleter {
  void operator()(ipbind_model *m) const { ipbind_model_free(m); }
};
using ModelPtr = std::unique_ptr<ipbind_model, ModelDeleter>;

int report(ipbind_status status, const char *what) {
  if (status == IPBIND_OK)
    return 0;
  std::cerr << "ipbind " << what << ": " << ipbind_last_error() << '\n';
  return static_cast<int>(status);
}

ipbind_split split_from(const std::string &name) {
  if (name == "train")
    return IPBIND_SPLIT_TRAIN;
  if (name == "val")
    return IPBIND_SPLIT_VAL;
  return IPBIND_SPLIT_TEST;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

int load_model(const std::string &path, ModelPtr &out) {
  ipbind_model *m = nullptr;
  if (int rc = report(ipbind_model_load(path.c_str(), &m), "load checkpoint"))
    return rc;
  out.reset(m);
  return 0;
}

void print_metrics(const ipbind_metrics &m) {
  std::cout << "[metrics]\n"
            << "n = " << m.n << "\n"
            << "rmse = " << fmt(m.rmse) << "\n"
            << "pearson = " << (std::isnan(m.pearson) ? "nan" : fmt(m.pearson))
            << "\n";
}

// Reads "id,prediction,label" rows written by `predict`.
int metrics_from_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "ipbind metrics: cannot read '" << path << "'\n";
    return kExitData;
  }
  std::string line;
  std::getline(in, line);
  if (line.rfind("id,prediction,label", 0) != 0) {
    std::cerr << "ipbind metrics: expected header 'id,prediction,label'\n";
    return kExitData;
  }
  std::vector<double> pred, label;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    std::stringstream ss(line);
    std::string id, p, l;
    std::getline(ss, id, ',');
    std::getline(ss, p, ',');
    std::getline(ss, l, ',');
    if (l.empty())
      continue;
    try {
      pred.push_back(std::stod(p));
      label.push_back(std::stod(l));
    } catch (const std::exception &) {
      std::cerr << "ipbind metrics: malformed row '" << line << "'\n";
      return kExitData;
    }
  }
  ipbind_metrics m {};
  if (int rc = report(ipbind_compute_metrics(pred.data(), label.data(),
                                             pred.size(), &m),
                      "metrics"))
    return rc;
  print_metrics(m);
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app { "Protein-ligand binding affinity from per-atom energy "
                 "differences" };
  app.require_subcommand(1);

  std::string manifest, config, out_dir, checkpoint, split = "test", out_csv;
  std::uint64_t seed = 0;
  int trials = 20, count = 20;
  double tolerance = 1e-3;
  bool write_pdb = false, quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress warnings");

  auto *train = app.add_subcommand("train", "Train a model from a manifest");
  train->add_option("--manifest", manifest, "Dataset manifest CSV")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--config", config, "Key-value config file");
  train->add_option("--out-dir", out_dir, "Output directory")->required();
  train->add_option("--checkpoint", checkpoint, "Resume from checkpoint");
  auto *train_seed = train->add_option("--seed", seed, "Overrides config seed");

  auto *predict = app.add_subcommand("predict", "Predict affinities");
  predict->add_option("--manifest", manifest)->required();
  predict->add_option("--checkpoint", checkpoint)->required();
  predict->add_option("--out-dir", out_dir, "Directory for predictions.csv");
  predict->add_option("--out", out_csv, "Explicit output CSV path");
  predict->add_option("--split", split)
      ->check(CLI::IsMember({ "train", "val", "test" }));

  auto *explain = app.add_subcommand("explain", "Per-atom attribution export");
  explain->add_option("--manifest", manifest)->required();
  explain->add_option("--checkpoint", checkpoint)->required();
  explain->add_option("--out-dir", out_dir)->required();
  explain->add_option("--split", split)
      ->check(CLI::IsMember({ "train", "val", "test" }));
  explain->add_flag("--pdb", write_pdb, "Also write B-factor PDB files");

  auto *invariance = app.add_subcommand(
      "check-invariance", "Random rigid motions must not change predictions");
  invariance->add_option("--manifest", manifest)->required();
  invariance->add_option("--checkpoint", checkpoint)->required();
  invariance->add_option("--trials", trials)->check(CLI::PositiveNumber);
  invariance->add_option("--tolerance", tolerance)->check(CLI::PositiveNumber);
  invariance->add_option("--seed", seed);
  invariance->add_option("--split", split)
      ->check(CLI::IsMember({ "train", "val", "test" }));

  auto *metrics = app.add_subcommand("metrics", "RMSE and Pearson of a CSV");
  metrics->add_option("--predictions", out_csv, "CSV id,prediction,label")
      ->required();

  auto *synth = app.add_subcommand("synth", "Write a synthetic dataset");
  synth->add_option("--out-dir", out_dir)->required();
  synth->add_option("--count", count)->check(CLI::PositiveNumber);
  synth->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }
  ipbind_set_quiet(quiet ? 1 : 0);

  if (*train) {
    char best[4096] = {};
    const int rc = report(
        ipbind_train(manifest.c_str(), config.empty() ? nullptr : config.c_str(),
                     out_dir.c_str(),
                     checkpoint.empty() ? nullptr : checkpoint.c_str(),
                     train_seed->count() > 0 ? 1 : 0, seed, best, sizeof best),
        "train");
    if (rc == 0)
      std::cout << "best checkpoint: " << best << "\n";
    return rc;
  }

  if (*predict) {
    ModelPtr model;
    if (int rc = load_model(checkpoint, model))
      return rc;
    if (out_csv.empty()) {
      if (out_dir.empty()) {
        std::cerr << "ipbind predict: one of --out or --out-dir is required\n";
        return kExitUsage;
      }
      std::filesystem::create_directories(out_dir);
      out_csv = (std::filesystem::path(out_dir) / "predictions.csv").string();
    }
    ipbind_metrics m {};
    if (int rc = report(ipbind_predict_manifest(model.get(), manifest.c_str(),
                                                split_from(split),
                                                out_csv.c_str(), &m),
                        "predict"))
      return rc;
    std::cout << "predictions: " << out_csv << "\n";
    if (m.n > 0)
      print_metrics(m);
    return 0;
  }

  if (*explain) {
    ModelPtr model;
    if (int rc = load_model(checkpoint, model))
      return rc;
    const int rc = report(ipbind_explain_manifest(model.get(), manifest.c_str(),
                                                  split_from(split),
                                                  out_dir.c_str(),
                                                  write_pdb ? 1 : 0),
                          "explain");
    if (rc == 0)
      std::cout << "attributions written to " << out_dir << "\n";
    return rc;
  }

  if (*invariance) {
    ModelPtr model;
    if (int rc = load_model(checkpoint, model))
      return rc;
    double worst = 0.0;
    std::size_t checked = 0;
    if (int rc = report(ipbind_check_invariance(model.get(), manifest.c_str(),
                                                split_from(split), trials, seed,
                                                &worst, &checked),
                        "check-invariance"))
      return rc;
    const bool pass = worst < tolerance;
    std::cout << "complexes: " << checked << "\n"
              << "trials per complex: " << trials << "\n"
              << "max |delta affinity|: " << worst << "\n"
              << "tolerance: " << tolerance << "\n"
              << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? 0 : kExitNumerical;
  }

  if (*metrics)
    return metrics_from_csv(out_csv);

  if (*synth) {
    char path[4096] = {};
    const int rc = report(ipbind_synthesize_dataset(out_dir.c_str(), count,
                                                    seed, path, sizeof path),
                          "synth");
    if (rc == 0)
      std::cout << "manifest: " << path << "\n";
    return rc;
  }
  return kExitUsage;
}
