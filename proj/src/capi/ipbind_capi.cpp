//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "ipbind/ipbind.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <new>
#include <optional>
#include <string>

#include "checkpoint.hpp"
#include "config.hpp"
#include "error.hpp"
#include "head.hpp"
#include "metrics.hpp"
#include "params.hpp"
#include "structio.hpp"
#include "synthetic.hpp"
#include "trainer.hpp"

struct ipbind_model {
  ipbind::RunConfig config;
  ipbind::ModelParams params;
  std::optional<ipbind::BasicModelParams<float>> params_f32;

  ipbind::PredictionReport predict(const ipbind::PocketComplex &pc) const {
    const auto prepared = ipbind::prepare_complex(pc, config.model);
    if (params_f32)
      return ipbind::predict(*params_f32, config.model, prepared);
    return ipbind::predict(params, config.model, prepared);
  }

  void refresh_cache() {
    if (config.model.precision == ipbind::Precision::kFloat32)
      params_f32 = params.cast<float>();
    else
      params_f32.reset();
  }
};

struct ipbind_complex {
  ipbind::PocketComplex pc;
};

struct ipbind_report {
  ipbind::PredictionReport report;
};

namespace {
thread_local std::string g_last_error;

ipbind_status fail(ipbind_status status, const std::string &message) {
  g_last_error = message;
  return status;
}

template <class F>
ipbind_status guarded(F &&f) {
  g_last_error.clear();
  try {
    f();
    return IPBIND_OK;
  } catch (const ipbind::Error &e) {
    return fail(static_cast<ipbind_status>(e.kind()), e.what());
  } catch (const std::bad_alloc &) {
    return fail(IPBIND_ERR_INTERNAL, "out of memory");
  } catch (const std::filesystem::filesystem_error &e) {
    return fail(IPBIND_ERR_DATA, e.what());
  } catch (const std::exception &e) {
    return fail(IPBIND_ERR_INTERNAL, e.what());
  }
}

void require(bool cond, const char *what) {
  if (!cond)
    throw ipbind::UsageError(what);
}

void copy_out(const std::string &s, char *buf, std::size_t len) {
  if (buf == nullptr || len == 0)
    return;
  const std::size_t n = std::min(len - 1, s.size());
  std::memcpy(buf, s.data(), n);
  buf[n] = '\0';
}

ipbind::Split to_split(ipbind_split s) {
  switch (s) {
  case IPBIND_SPLIT_TRAIN:
    return ipbind::Split::kTrain;
  case IPBIND_SPLIT_VAL:
    return ipbind::Split::kVal;
  case IPBIND_SPLIT_TEST:
    return ipbind::Split::kTest;
  }
  throw ipbind::UsageError("unknown split");
}

void write_text(const std::string &path, const std::string &text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os)
    throw ipbind::DataError("cannot write '" + path + "'");
  os << text;
}
} // namespace

extern "C" {

const char *ipbind_version(void) { return "1.0.0"; }

const char *ipbind_last_error(void) { return g_last_error.c_str(); }

void ipbind_set_quiet(int quiet) {
  if (quiet) {
    ipbind::set_warning_handler({});
  } else {
    ipbind::set_warning_handler([](std::string_view msg) {
      std::fprintf(stderr, "ipbind: warning: %.*s\n",
                   static_cast<int>(msg.size()), msg.data());
    });
  }
}

ipbind_status ipbind_config_check(const char *config_path, char *buf,
                                  size_t buflen) {
  return guarded([&] {
    require(config_path != nullptr, "config path is NULL");
    copy_out(ipbind::serialize_config(ipbind::load_config(config_path)), buf,
             buflen);
  });
}

ipbind_status ipbind_model_create(const char *config_path, uint64_t seed,
                                  ipbind_model **out) {
  return guarded([&] {
    require(out != nullptr, "output handle pointer is NULL");
    auto m = std::make_unique<ipbind_model>();
    if (config_path)
      m->config = ipbind::load_config(config_path);
    m->config.train.seed = seed;
    m->params =
        ipbind::init_params(m->config.model, m->config.loss, seed);
    m->refresh_cache();
    *out = m.release();
  });
}

ipbind_status ipbind_model_load(const char *checkpoint_path,
                                ipbind_model **out) {
  return guarded([&] {
    require(checkpoint_path != nullptr && out != nullptr,
            "NULL argument to ipbind_model_load");
    auto state = ipbind::load_checkpoint(checkpoint_path);
    auto m = std::make_unique<ipbind_model>();
    m->config = state.config;
    m->params = std::move(state.params);
    m->refresh_cache();
    *out = m.release();
  });
}

ipbind_status ipbind_model_save(const ipbind_model *model,
                                const char *checkpoint_path) {
  return guarded([&] {
    require(model != nullptr && checkpoint_path != nullptr,
            "NULL argument to ipbind_model_save");
    ipbind::TrainState state;
    state.config = model->config;
    state.params = model->params;
    state.adam_m = ipbind::zero_params(model->config.model);
    state.adam_v = ipbind::zero_params(model->config.model);
    ipbind::save_checkpoint(state, checkpoint_path);
  });
}

void ipbind_model_free(ipbind_model *model) { delete model; }

size_t ipbind_model_parameter_count(const ipbind_model *model) {
  return model ? ipbind::parameter_count(model->params) : 0;
}

int ipbind_model_frame_mode(const ipbind_model *model) {
  if (!model)
    return -1;
  switch (model->config.model.frame_mode) {
  case ipbind::FrameMode::kSE3:
    return 0;
  case ipbind::FrameMode::kE3:
    return 1;
  case ipbind::FrameMode::kNone:
    return 2;
  }
  return -1;
}

ipbind_status ipbind_complex_load(const char *protein_pdb,
                                  const char *ligand_sdf, int max_residues,
                                  ipbind_complex **out) {
  return guarded([&] {
    require(protein_pdb && ligand_sdf && out,
            "NULL argument to ipbind_complex_load");
    auto protein = ipbind::parse_protein(ipbind::read_text_file(protein_pdb));
    auto ligand = ipbind::parse_ligand(ipbind::read_text_file(ligand_sdf));
    auto c = std::make_unique<ipbind_complex>();
    c->pc = ipbind::crop_pocket(protein, ligand,
                                max_residues > 0 ? max_residues : 50);
    *out = c.release();
  });
}

ipbind_status ipbind_complex_parse(const char *protein_pdb_text,
                                   const char *ligand_sdf_text,
                                   int max_residues, ipbind_complex **out) {
  return guarded([&] {
    require(protein_pdb_text && ligand_sdf_text && out,
            "NULL argument to ipbind_complex_parse");
    auto protein = ipbind::parse_protein(protein_pdb_text);
    auto ligand = ipbind::parse_ligand(ligand_sdf_text);
    auto c = std::make_unique<ipbind_complex>();
    c->pc = ipbind::crop_pocket(protein, ligand,
                                max_residues > 0 ? max_residues : 50);
    *out = c.release();
  });
}

void ipbind_complex_free(ipbind_complex *complex) { delete complex; }

size_t ipbind_complex_atom_count(const ipbind_complex *complex) {
  return complex ? complex->pc.complex.size() : 0;
}

size_t ipbind_complex_pocket_atom_count(const ipbind_complex *complex) {
  return complex ? complex->pc.protein_pocket.size() : 0;
}

ipbind_status ipbind_complex_transform(ipbind_complex *complex,
                                       const double rotation[9],
                                       const double translation[3]) {
  return guarded([&] {
    require(complex && rotation && translation,
            "NULL argument to ipbind_complex_transform");
    Eigen::Matrix3d r;
    r << rotation[0], rotation[1], rotation[2], rotation[3], rotation[4],
        rotation[5], rotation[6], rotation[7], rotation[8];
    const Eigen::Vector3d t(translation[0], translation[1], translation[2]);
    require(r.allFinite() && t.allFinite(), "non-finite transform");
    require((r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <=
                1e-6,
            "transform matrix is not orthogonal");
    complex->pc = ipbind::rigid_transform(complex->pc, r, t);
  });
}

ipbind_status ipbind_predict(const ipbind_model *model,
                             const ipbind_complex *complex, double *affinity) {
  return guarded([&] {
    require(model && complex && affinity, "NULL argument to ipbind_predict");
    *affinity = model->predict(complex->pc).affinity;
  });
}

ipbind_status ipbind_predict_report(const ipbind_model *model,
                                    const ipbind_complex *complex,
                                    ipbind_report **out) {
  return guarded([&] {
    require(model && complex && out, "NULL argument to ipbind_predict_report");
    auto r = std::make_unique<ipbind_report>();
    r->report = model->predict(complex->pc);
    *out = r.release();
  });
}

void ipbind_report_free(ipbind_report *report) { delete report; }

double ipbind_report_affinity(const ipbind_report *report) {
  return report ? report->report.affinity
                : std::numeric_limits<double>::quiet_NaN();
}

size_t ipbind_report_atom_count(const ipbind_report *report) {
  return report ? static_cast<size_t>(report->report.per_atom_bound.size()) : 0;
}

ipbind_status ipbind_report_atoms(const ipbind_report *report, double *bound,
                                  double *unbound, double *delta, size_t n) {
  return guarded([&] {
    require(report != nullptr, "NULL report");
    const auto &r = report->report;
    require(n == static_cast<size_t>(r.per_atom_bound.size()),
            "buffer length does not match the atom count");
    for (size_t i = 0; i < n; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      if (bound)
        bound[i] = r.per_atom_bound[k];
      if (unbound)
        unbound[i] = r.per_atom_unbound[k];
      if (delta)
        delta[i] = r.per_atom_delta[k];
    }
  });
}

ipbind_status ipbind_report_write(const ipbind_report *report,
                                  const ipbind_complex *complex,
                                  const char *csv_path, const char *pdb_path) {
  return guarded([&] {
    require(report && complex, "NULL argument to ipbind_report_write");
    if (csv_path)
      write_text(csv_path, ipbind::attribution_csv(report->report, complex->pc));
    if (pdb_path)
      write_text(pdb_path, ipbind::attribution_pdb(report->report, complex->pc));
  });
}

ipbind_status ipbind_train(const char *manifest_path, const char *config_path,
                           const char *out_dir, const char *resume_checkpoint,
                           int override_seed, uint64_t seed, char *best_path,
                           size_t best_path_len) {
  return guarded([&] {
    require(manifest_path && out_dir, "manifest and output directory required");
    ipbind::RunConfig config;
    if (config_path)
      config = ipbind::load_config(config_path);
    if (override_seed)
      config.train.seed = seed;
    const auto manifest = ipbind::load_manifest(manifest_path);
    std::optional<std::filesystem::path> resume;
    if (resume_checkpoint)
      resume = resume_checkpoint;
    const auto result = ipbind::fit(manifest, config, out_dir, resume);
    copy_out(result.best_checkpoint.string(), best_path, best_path_len);
  });
}

ipbind_status ipbind_predict_manifest(const ipbind_model *model,
                                      const char *manifest_path,
                                      ipbind_split split, const char *out_csv,
                                      ipbind_metrics *metrics) {
  return guarded([&] {
    require(model && manifest_path && out_csv,
            "NULL argument to ipbind_predict_manifest");
    const auto manifest = ipbind::load_manifest(manifest_path);
    const auto entries = manifest.select(to_split(split));

    bool any_label = false;
    for (const auto *e : entries)
      any_label = any_label || e->label.has_value();

    std::string csv = any_label ? "id,prediction,label\n" : "id,prediction\n";
    std::vector<double> preds, labels;
    char buf[256];
    for (const auto *e : entries) {
      const auto pc = ipbind::load_entry(*e, model->config.model.max_residues);
      ipbind::PredictionReport r;
      try {
        r = model->predict(pc);
      } catch (const ipbind::NumericalError &err) {
        throw ipbind::NumericalError("complex '" + e->id + "': " + err.what());
      }
      if (any_label) {
        if (e->label) {
          std::snprintf(buf, sizeof buf, "%s,%.9g,%.9g\n", e->id.c_str(),
                        r.affinity, *e->label);
          preds.push_back(r.affinity);
          labels.push_back(*e->label);
        } else {
          std::snprintf(buf, sizeof buf, "%s,%.9g,\n", e->id.c_str(),
                        r.affinity);
        }
      } else {
        std::snprintf(buf, sizeof buf, "%s,%.9g\n", e->id.c_str(), r.affinity);
      }
      csv += buf;
    }
    write_text(out_csv, csv);

    if (metrics) {
      *metrics = ipbind_metrics { 0.0, std::numeric_limits<double>::quiet_NaN(),
                                  0 };
      if (!preds.empty()) {
        const auto m = ipbind::compute_metrics(preds, labels);
        *metrics = ipbind_metrics { m.rmse, m.pearson, m.n };
      }
    }
  });
}

ipbind_status ipbind_explain_manifest(const ipbind_model *model,
                                      const char *manifest_path,
                                      ipbind_split split, const char *out_dir,
                                      int write_pdb) {
  return guarded([&] {
    require(model && manifest_path && out_dir,
            "NULL argument to ipbind_explain_manifest");
    const auto manifest = ipbind::load_manifest(manifest_path);
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    for (const auto *e : manifest.select(to_split(split))) {
      const auto pc = ipbind::load_entry(*e, model->config.model.max_residues);
      const auto r = model->predict(pc);
      write_text((dir / (e->id + "_attribution.csv")).string(),
                 ipbind::attribution_csv(r, pc));
      if (write_pdb)
        write_text((dir / (e->id + "_attribution.pdb")).string(),
                   ipbind::attribution_pdb(r, pc));
    }
  });
}

ipbind_status ipbind_check_invariance(const ipbind_model *model,
                                      const char *manifest_path,
                                      ipbind_split split, int trials,
                                      uint64_t seed, double *max_abs_delta,
                                      size_t *complexes_checked) {
  return guarded([&] {
    require(model && manifest_path && max_abs_delta,
            "NULL argument to ipbind_check_invariance");
    require(trials >= 1, "trials must be at least 1");
    const auto manifest = ipbind::load_manifest(manifest_path);
    const auto entries = manifest.select(to_split(split));
    if (entries.empty())
      throw ipbind::DataError("manifest split has no entries");

    ipbind::Rng rng(seed);
    double worst = 0.0;
    for (const auto *e : entries) {
      const auto pc = ipbind::load_entry(*e, model->config.model.max_residues);
      const double base = model->predict(pc).affinity;
      for (int t = 0; t < trials; ++t) {
        const Eigen::Matrix3d r = ipbind::random_rotation(rng);
        const Eigen::Vector3d w(rng.uniform(-50, 50), rng.uniform(-50, 50),
                                rng.uniform(-50, 50));
        const double moved =
            model->predict(ipbind::rigid_transform(pc, r, w)).affinity;
        worst = std::max(worst, std::abs(moved - base));
      }
    }
    *max_abs_delta = worst;
    if (complexes_checked)
      *complexes_checked = entries.size();
  });
}

ipbind_status ipbind_compute_metrics(const double *predictions,
                                     const double *labels, size_t n,
                                     ipbind_metrics *out) {
  return guarded([&] {
    require(predictions && labels && out,
            "NULL argument to ipbind_compute_metrics");
    const auto m = ipbind::compute_metrics({ predictions, n }, { labels, n });
    *out = ipbind_metrics { m.rmse, m.pearson, m.n };
  });
}

ipbind_status ipbind_synthesize_dataset(const char *out_dir, int count,
                                        uint64_t seed, char *manifest_path,
                                        size_t manifest_path_len) {
  return guarded([&] {
    require(out_dir != nullptr, "output directory is NULL");
    const auto path = ipbind::write_synthetic_dataset(out_dir, count, seed);
    copy_out(path.string(), manifest_path, manifest_path_len);
  });
}

} // extern "C"
