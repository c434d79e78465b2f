#include "autoqsar.h"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "autoqsar/descriptors.hpp"
#include "autoqsar/errors.hpp"
#include "autoqsar/model_io.hpp"
#include "autoqsar/pipeline.hpp"
#include "autoqsar/report.hpp"

using namespace autoqsar;

namespace {

thread_local std::string g_last_error;

struct ConfigHandle {
  PipelineConfig config;
  std::vector<std::string> methods{"kpls", "pls", "pcr", "mlr", "rp"};
  std::vector<std::string> fingerprints{"radial", "linear", "dendritic", "molprint2d"};
};

std::vector<std::string> split_list(const char* csv) {
  std::vector<std::string> out;
  if (!csv) return out;
  std::string item;
  std::istringstream in(csv);
  while (std::getline(in, item, ',')) {
    std::size_t b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    std::size_t e = item.find_last_not_of(" \t");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

aq_status to_status(const std::exception& e) {
  g_last_error = e.what();
  if (dynamic_cast<const ConfigError*>(&e)) return AQ_ERR_CONFIG;
  if (dynamic_cast<const NoModelsError*>(&e)) return AQ_ERR_NO_MODELS;
  if (dynamic_cast<const ArchiveError*>(&e)) return AQ_ERR_DATA;
  if (dynamic_cast<const DataError*>(&e)) return AQ_ERR_DATA;
  return AQ_ERR_INTERNAL;
}

template <typename Fn>
aq_status guarded(Fn&& fn) {
  try {
    fn();
    return AQ_OK;
  } catch (const std::exception& e) {
    return to_status(e);
  } catch (...) {
    g_last_error = "unknown error";
    return AQ_ERR_INTERNAL;
  }
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

struct aq_dataset {
  Dataset ds;
};
struct aq_config {
  ConfigHandle handle;
};
struct aq_results {
  RankedModels rm;
};
struct aq_model {
  TrainedModel model;
};

extern "C" {

const char* aq_version(void) { return "1.0.0"; }

const char* aq_last_error(void) { return g_last_error.c_str(); }

void aq_string_free(char* s) { std::free(s); }

aq_status aq_dataset_load_csv(const char* path, const char* activity_transform,
                              aq_dataset** out) {
  if (!path || !out) {
    g_last_error = "null argument";
    return AQ_ERR_CONFIG;
  }
  *out = nullptr;
  return guarded([&] {
    ActivityTransform t = activity_transform
                              ? activity_transform_from_name(activity_transform)
                              : ActivityTransform::None;
    auto handle = std::make_unique<aq_dataset>();
    handle->ds = load_csv(path, t);
    *out = handle.release();
  });
}

void aq_dataset_free(aq_dataset* ds) { delete ds; }

int aq_dataset_size(const aq_dataset* ds) {
  return ds ? static_cast<int>(ds->ds.size()) : 0;
}

int aq_dataset_warning_count(const aq_dataset* ds) {
  return ds ? static_cast<int>(ds->ds.warnings.size()) : 0;
}

const char* aq_dataset_warning(const aq_dataset* ds, int index) {
  if (!ds || index < 0 || index >= static_cast<int>(ds->ds.warnings.size()))
    return nullptr;
  return ds->ds.warnings[static_cast<std::size_t>(index)].c_str();
}

aq_config* aq_config_new(void) { return new aq_config(); }

void aq_config_free(aq_config* cfg) { delete cfg; }

aq_status aq_config_set_grid(aq_config* cfg, double frac_min, double frac_max,
                             double step, int models_per_interval) {
  if (!cfg) {
    g_last_error = "null config";
    return AQ_ERR_CONFIG;
  }
  cfg->handle.config.frac_min = frac_min;
  cfg->handle.config.frac_max = frac_max;
  cfg->handle.config.step = step;
  cfg->handle.config.models_per_interval = models_per_interval;
  return AQ_OK;
}

aq_status aq_config_set_max_pair_correlation(aq_config* cfg, double value) {
  if (!cfg) {
    g_last_error = "null config";
    return AQ_ERR_CONFIG;
  }
  cfg->handle.config.max_pair_correlation = value;
  return AQ_OK;
}

aq_status aq_config_set_seed(aq_config* cfg, uint64_t seed) {
  if (!cfg) {
    g_last_error = "null config";
    return AQ_ERR_CONFIG;
  }
  cfg->handle.config.master_seed = seed;
  return AQ_OK;
}

aq_status aq_config_set_threads(aq_config* cfg, int threads) {
  if (!cfg) {
    g_last_error = "null config";
    return AQ_ERR_CONFIG;
  }
  cfg->handle.config.thread_count = threads;
  return AQ_OK;
}

aq_status aq_config_set_classification_threshold(aq_config* cfg, double threshold) {
  if (!cfg) {
    g_last_error = "null config";
    return AQ_ERR_CONFIG;
  }
  cfg->handle.config.classification_threshold = threshold;
  return AQ_OK;
}

aq_status aq_config_set_methods(aq_config* cfg, const char* methods_csv,
                                const char* fingerprints_csv) {
  if (!cfg) {
    g_last_error = "null config";
    return AQ_ERR_CONFIG;
  }
  return guarded([&] {
    auto methods = split_list(methods_csv);
    if (methods.empty()) throw ConfigError("method list is empty");
    for (const std::string& m : methods) method_from_name(m);  // validates
    auto fps = split_list(fingerprints_csv);
    for (const std::string& f : fps) scheme_from_name(f);
    cfg->handle.methods = std::move(methods);
    cfg->handle.fingerprints = std::move(fps);
  });
}

aq_status aq_run(const aq_config* cfg, const aq_dataset* ds, aq_results** out) {
  if (!cfg || !ds || !out) {
    g_last_error = "null argument";
    return AQ_ERR_CONFIG;
  }
  *out = nullptr;
  return guarded([&] {
    PipelineConfig config = cfg->handle.config;
    config.roster = expand_roster(cfg->handle.methods, cfg->handle.fingerprints,
                                  config.classification_threshold);
    auto handle = std::make_unique<aq_results>();
    handle->rm = run_pipeline(config, ds->ds);
    *out = handle.release();
  });
}

void aq_results_free(aq_results* results) { delete results; }

int aq_results_ranked_count(const aq_results* results) {
  return results ? static_cast<int>(results->rm.ranked.size()) : 0;
}

int aq_results_failed_count(const aq_results* results) {
  return results ? static_cast<int>(results->rm.failed.size()) : 0;
}

aq_status aq_results_card_json(const aq_results* results, int rank_index, char** out) {
  if (!results || !out) {
    g_last_error = "null argument";
    return AQ_ERR_CONFIG;
  }
  if (rank_index < 0 || rank_index >= static_cast<int>(results->rm.ranked.size())) {
    g_last_error = "rank index out of range";
    return AQ_ERR_CONFIG;
  }
  return guarded([&] {
    const ScoreCard& c = results->rm.ranked[static_cast<std::size_t>(rank_index)];
    std::string j = "{\"model_id\":\"" + c.model_id + "\",\"method\":\"" + c.method +
                    "\",\"feature_source\":\"" + c.feature_source +
                    "\",\"r2_train\":" + format_double(c.r2_train) +
                    ",\"q2_test\":" + format_double(c.q2_test) +
                    ",\"score\":" + format_double(c.score) +
                    ",\"components\":" + std::to_string(c.components) +
                    ",\"train_fraction\":" + format_double(c.train_fraction) + "}";
    *out = dup_string(j);
  });
}

aq_status aq_results_manifest(const aq_results* results, char** out) {
  if (!results || !out) {
    g_last_error = "null argument";
    return AQ_ERR_CONFIG;
  }
  return guarded([&] { *out = dup_string(manifest_json(results->rm)); });
}

aq_status aq_results_save(const aq_results* results, const aq_dataset* ds,
                          const char* dir, int top_k) {
  if (!results || !ds || !dir) {
    g_last_error = "null argument";
    return AQ_ERR_CONFIG;
  }
  return guarded([&] { save_run(results->rm, ds->ds, dir, top_k); });
}

aq_status aq_model_load(const char* path, aq_model** out) {
  if (!path || !out) {
    g_last_error = "null argument";
    return AQ_ERR_CONFIG;
  }
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<aq_model>();
    handle->model = load_model(path);
    *out = handle.release();
  });
}

void aq_model_free(aq_model* model) { delete model; }

aq_status aq_model_predict_csv(const aq_model* model, const char* input_csv,
                               const char* output_csv) {
  if (!model || !input_csv || !output_csv) {
    g_last_error = "null argument";
    return AQ_ERR_CONFIG;
  }
  return guarded([&] {
    const auto rows = load_structures_csv(input_csv);
    std::vector<Molecule> mols;
    mols.reserve(rows.size());
    for (const DataRecord& r : rows) mols.push_back(parse_smiles(r.smiles));
    const FeatureBlock block = features_for(model->model, mols);
    const Eigen::VectorXd pred = predict(model->model, block);

    std::ofstream out(output_csv);
    if (!out) throw DataError(std::string("cannot write ") + output_csv);
    out << "id,smiles,predicted\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
      out << rows[i].id << "," << rows[i].smiles << ","
          << format_double(pred(static_cast<Eigen::Index>(i))) << "\n";
  });
}

aq_status aq_model_predict_smiles(const aq_model* model, const char* smiles,
                                  double* out_value) {
  if (!model || !smiles || !out_value) {
    g_last_error = "null argument";
    return AQ_ERR_CONFIG;
  }
  return guarded([&] {
    std::vector<Molecule> mols{parse_smiles(smiles)};
    const FeatureBlock block = features_for(model->model, mols);
    *out_value = predict(model->model, block)(0);
  });
}

aq_status aq_report(const char* run_dir, const char* out_dir) {
  if (!run_dir || !out_dir) {
    g_last_error = "null argument";
    return AQ_ERR_CONFIG;
  }
  return guarded([&] { write_report_from_run(run_dir, out_dir); });
}

aq_status aq_run_summary(const char* run_dir, char** out) {
  if (!run_dir || !out) {
    g_last_error = "null argument";
    return AQ_ERR_CONFIG;
  }
  return guarded([&] {
    auto [rm, ds] = load_run(run_dir);
    (void)ds;
    *out = dup_string(run_summary_text(rm));
  });
}

aq_status aq_catalog_csv(char** out) {
  if (!out) {
    g_last_error = "null argument";
    return AQ_ERR_CONFIG;
  }
  return guarded([&] { *out = dup_string(DescriptorCatalog::instance().to_csv()); });
}

}  // extern "C"
