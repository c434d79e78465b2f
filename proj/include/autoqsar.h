/*
 * autoqsar C API: automated QSAR model building behind a stable ABI.
 *
 * All handles are opaque; every fallible call returns aq_status and leaves a
 * human-readable message in aq_last_error() (thread-local) on failure.
 * Strings returned through char** are heap-allocated; release them with
 * aq_string_free.
 */

#ifndef AUTOQSAR_H
#define AUTOQSAR_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aq_status {
  AQ_OK = 0,
  AQ_ERR_CONFIG = 1,    /* bad configuration or usage */
  AQ_ERR_DATA = 2,      /* bad input data (CSV, SMILES, archives) */
  AQ_ERR_NO_MODELS = 3, /* every model in the sweep failed */
  AQ_ERR_INTERNAL = 4
} aq_status;

typedef struct aq_dataset aq_dataset;
typedef struct aq_config aq_config;
typedef struct aq_results aq_results;
typedef struct aq_model aq_model;

const char* aq_version(void);
const char* aq_last_error(void);
void aq_string_free(char* s);

/* ---- dataset ----------------------------------------------------------- */

/* activity_transform: "none", "ic50-nm" or "ic50-um" (NULL means none). */
aq_status aq_dataset_load_csv(const char* path, const char* activity_transform,
                              aq_dataset** out);
void aq_dataset_free(aq_dataset* ds);
int aq_dataset_size(const aq_dataset* ds);
int aq_dataset_warning_count(const aq_dataset* ds);
const char* aq_dataset_warning(const aq_dataset* ds, int index);

/* ---- configuration ------------------------------------------------------ */

/* Defaults: fractions 0.70..0.80 step 0.01, 99 models per interval, max pair
 * correlation 0.99, methods kpls,pls,pcr,mlr,rp over all four fingerprint
 * schemes, single thread, seed 0. */
aq_config* aq_config_new(void);
void aq_config_free(aq_config* cfg);
aq_status aq_config_set_grid(aq_config* cfg, double frac_min, double frac_max,
                             double step, int models_per_interval);
aq_status aq_config_set_max_pair_correlation(aq_config* cfg, double value);
aq_status aq_config_set_seed(aq_config* cfg, uint64_t seed);
aq_status aq_config_set_threads(aq_config* cfg, int threads);
aq_status aq_config_set_classification_threshold(aq_config* cfg, double threshold);
/* Comma-separated lists, e.g. "kpls,pls" and "radial,linear". */
aq_status aq_config_set_methods(aq_config* cfg, const char* methods_csv,
                                const char* fingerprints_csv);

/* ---- pipeline ----------------------------------------------------------- */

aq_status aq_run(const aq_config* cfg, const aq_dataset* ds, aq_results** out);
void aq_results_free(aq_results* results);
int aq_results_ranked_count(const aq_results* results);
int aq_results_failed_count(const aq_results* results);
/* One ranked scorecard as a JSON object. */
aq_status aq_results_card_json(const aq_results* results, int rank_index, char** out);
/* The deterministic ranked manifest (same bytes save_run writes). */
aq_status aq_results_manifest(const aq_results* results, char** out);
/* Writes manifest.json, scorecards.csv, dataset.csv, models/, top.model. */
aq_status aq_results_save(const aq_results* results, const aq_dataset* ds,
                          const char* dir, int top_k);

/* ---- trained models ----------------------------------------------------- */

aq_status aq_model_load(const char* path, aq_model** out);
void aq_model_free(aq_model* model);
/* Input CSV needs id,smiles columns; writes id,smiles,predicted. */
aq_status aq_model_predict_csv(const aq_model* model, const char* input_csv,
                               const char* output_csv);
aq_status aq_model_predict_smiles(const aq_model* model, const char* smiles,
                                  double* out_value);

/* ---- reporting and inspection ------------------------------------------- */

aq_status aq_report(const char* run_dir, const char* out_dir);
aq_status aq_run_summary(const char* run_dir, char** out);
aq_status aq_catalog_csv(char** out);

#ifdef __cplusplus
}
#endif

#endif /* AUTOQSAR_H */
