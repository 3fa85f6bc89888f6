/*
 * IPBind - Copyright 2026 The IPBind Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

/*
 * C interface to the IPBind binding-affinity model.
 *
 * Objects are opaque handles created by *_create / *_load functions and
 * released with the matching *_free function (free functions accept NULL).
 * Every fallible call returns an ipbind_status; on failure a message is
 * available from ipbind_last_error() on the calling thread until the next
 * API call on that thread.
 *
 * Handles are not internally synchronised. A const model may be used for
 * prediction from several threads at once; training mutates nothing the
 * caller holds.
 */

#ifndef IPBIND_IPBIND_H_
#define IPBIND_IPBIND_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(IPBIND_BUILDING_LIBRARY)
#    define IPBIND_API __declspec(dllexport)
#  else
#    define IPBIND_API __declspec(dllimport)
#  endif
#else
#  define IPBIND_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values match the CLI exit codes. */
typedef enum ipbind_status {
  IPBIND_OK = 0,
  IPBIND_ERR_USAGE = 1,     /* bad argument, config key or value */
  IPBIND_ERR_DATA = 2,      /* unreadable or malformed input file */
  IPBIND_ERR_NUMERICAL = 3, /* non-finite loss or prediction */
  IPBIND_ERR_INTERNAL = 4
} ipbind_status;

typedef enum ipbind_split {
  IPBIND_SPLIT_TRAIN = 0,
  IPBIND_SPLIT_VAL = 1,
  IPBIND_SPLIT_TEST = 2
} ipbind_split;

typedef struct ipbind_model ipbind_model;
typedef struct ipbind_complex ipbind_complex;
typedef struct ipbind_report ipbind_report;

typedef struct ipbind_metrics {
  double rmse;
  double pearson; /* NaN when undefined */
  size_t n;
} ipbind_metrics;

IPBIND_API const char *ipbind_version(void);
IPBIND_API const char *ipbind_last_error(void);
/* Suppress (quiet != 0) or restore warnings printed to stderr. */
IPBIND_API void ipbind_set_quiet(int quiet);

/* ---- configuration ---------------------------------------------------- */

/* Validates a key-value config file; writes its canonical text form into
 * buf when buf is non-NULL (truncated to buflen, always NUL-terminated). */
IPBIND_API ipbind_status ipbind_config_check(const char *config_path,
                                             char *buf, size_t buflen);

/* ---- models ----------------------------------------------------------- */

/* Fresh randomly initialised model. config_path may be NULL for defaults. */
IPBIND_API ipbind_status ipbind_model_create(const char *config_path,
                                             uint64_t seed,
                                             ipbind_model **out);
IPBIND_API ipbind_status ipbind_model_load(const char *checkpoint_path,
                                           ipbind_model **out);
IPBIND_API ipbind_status ipbind_model_save(const ipbind_model *model,
                                           const char *checkpoint_path);
IPBIND_API void ipbind_model_free(ipbind_model *model);
IPBIND_API size_t ipbind_model_parameter_count(const ipbind_model *model);
/* 0 = SE3, 1 = E3, 2 = NONE */
IPBIND_API int ipbind_model_frame_mode(const ipbind_model *model);

/* ---- complexes -------------------------------------------------------- */

/* Parses a PDB protein and SDF ligand and crops the pocket. max_residues
 * <= 0 selects the default of 50. */
IPBIND_API ipbind_status ipbind_complex_load(const char *protein_pdb,
                                             const char *ligand_sdf,
                                             int max_residues,
                                             ipbind_complex **out);
/* Same, from in-memory file contents. */
IPBIND_API ipbind_status ipbind_complex_parse(const char *protein_pdb_text,
                                              const char *ligand_sdf_text,
                                              int max_residues,
                                              ipbind_complex **out);
IPBIND_API void ipbind_complex_free(ipbind_complex *complex);
IPBIND_API size_t ipbind_complex_atom_count(const ipbind_complex *complex);
IPBIND_API size_t ipbind_complex_pocket_atom_count(const ipbind_complex *complex);
/* x -> R x + t applied to every atom; rotation is row-major 3x3 and must
 * be orthogonal to 1e-6 (reflections are accepted). */
IPBIND_API ipbind_status ipbind_complex_transform(ipbind_complex *complex,
                                                  const double rotation[9],
                                                  const double translation[3]);

/* ---- prediction ------------------------------------------------------- */

IPBIND_API ipbind_status ipbind_predict(const ipbind_model *model,
                                        const ipbind_complex *complex,
                                        double *affinity);
IPBIND_API ipbind_status ipbind_predict_report(const ipbind_model *model,
                                               const ipbind_complex *complex,
                                               ipbind_report **out);
IPBIND_API void ipbind_report_free(ipbind_report *report);
IPBIND_API double ipbind_report_affinity(const ipbind_report *report);
IPBIND_API size_t ipbind_report_atom_count(const ipbind_report *report);
/* Copies per-atom values (complex atom order) into out[0..n). Any pointer
 * may be NULL. */
IPBIND_API ipbind_status ipbind_report_atoms(const ipbind_report *report,
                                             double *bound, double *unbound,
                                             double *delta, size_t n);
/* Attribution CSV and (optionally) a PDB with delta in the B-factor column. */
IPBIND_API ipbind_status ipbind_report_write(const ipbind_report *report,
                                             const ipbind_complex *complex,
                                             const char *csv_path,
                                             const char *pdb_path);

/* ---- manifests, training and evaluation ------------------------------- */

/* Trains from a manifest; writes checkpoints and metrics.csv to out_dir.
 * resume_checkpoint may be NULL. The best checkpoint path is written to
 * best_path when non-NULL. seed overrides the config seed when
 * override_seed != 0. */
IPBIND_API ipbind_status ipbind_train(const char *manifest_path,
                                      const char *config_path,
                                      const char *out_dir,
                                      const char *resume_checkpoint,
                                      int override_seed, uint64_t seed,
                                      char *best_path, size_t best_path_len);

/* Writes "id,prediction[,label]" for the chosen split. When every entry is
 * labelled the label column is included and metrics (if non-NULL) is
 * filled; otherwise metrics->n is 0. */
IPBIND_API ipbind_status ipbind_predict_manifest(const ipbind_model *model,
                                                 const char *manifest_path,
                                                 ipbind_split split,
                                                 const char *out_csv,
                                                 ipbind_metrics *metrics);

/* Per-entry attribution exports: <out_dir>/<id>_attribution.csv and, with
 * write_pdb != 0, <out_dir>/<id>_attribution.pdb. */
IPBIND_API ipbind_status ipbind_explain_manifest(const ipbind_model *model,
                                                 const char *manifest_path,
                                                 ipbind_split split,
                                                 const char *out_dir,
                                                 int write_pdb);

/* Applies `trials` seeded random proper rigid motions to each complex of
 * the split and reports the largest |delta affinity|. */
IPBIND_API ipbind_status ipbind_check_invariance(const ipbind_model *model,
                                                 const char *manifest_path,
                                                 ipbind_split split, int trials,
                                                 uint64_t seed,
                                                 double *max_abs_delta,
                                                 size_t *complexes_checked);

IPBIND_API ipbind_status ipbind_compute_metrics(const double *predictions,
                                                const double *labels, size_t n,
                                                ipbind_metrics *out);

/* Writes a synthetic dataset (PDB/SDF pairs plus manifest.csv). */
IPBIND_API ipbind_status ipbind_synthesize_dataset(const char *out_dir,
                                                   int count, uint64_t seed,
                                                   char *manifest_path,
                                                   size_t manifest_path_len);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* IPBIND_IPBIND_H_ */
