// autoqsar command line: build / predict / report / inspect.
// Talks to the engine exclusively through the C API in autoqsar.h.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "autoqsar.h"

namespace {

int exit_code(aq_status status) {
  switch (status) {
    case AQ_OK: return 0;
    case AQ_ERR_CONFIG: return 1;
    case AQ_ERR_DATA: return 2;
    case AQ_ERR_NO_MODELS: return 3;
    case AQ_ERR_INTERNAL: return 1;
  }
  return 1;
}

int fail(aq_status status) {
  std::fprintf(stderr, "error: %s\n", aq_last_error());
  return exit_code(status);
}

struct BuildOptions {
  std::string input;
  std::string out_dir;
  double frac_min = 0.70;
  double frac_max = 0.80;
  double step = 0.01;
  int per_interval = 99;
  double max_pair_corr = 0.99;
  std::string methods = "kpls,pls,pcr,mlr,rp";
  std::string fingerprints = "radial,linear,dendritic,molprint2d";
  std::uint64_t seed = 0;
  int threads = 1;
  std::string activity_transform = "none";
  int top_k = 5;
  double classification_threshold = 0.0;
  bool has_threshold = false;
};

int run_build(const BuildOptions& opt) {
  aq_dataset* ds = nullptr;
  aq_status status =
      aq_dataset_load_csv(opt.input.c_str(), opt.activity_transform.c_str(), &ds);
  if (status != AQ_OK) return fail(status);
  for (int i = 0; i < aq_dataset_warning_count(ds); ++i)
    std::fprintf(stderr, "warning: %s\n", aq_dataset_warning(ds, i));
  std::fprintf(stderr, "loaded %d records from %s\n", aq_dataset_size(ds),
               opt.input.c_str());

  aq_config* cfg = aq_config_new();
  aq_config_set_grid(cfg, opt.frac_min, opt.frac_max, opt.step, opt.per_interval);
  aq_config_set_max_pair_correlation(cfg, opt.max_pair_corr);
  aq_config_set_seed(cfg, opt.seed);
  aq_config_set_threads(cfg, opt.threads);
  if (opt.has_threshold)
    aq_config_set_classification_threshold(cfg, opt.classification_threshold);
  status = aq_config_set_methods(cfg, opt.methods.c_str(), opt.fingerprints.c_str());
  if (status != AQ_OK) {
    aq_config_free(cfg);
    aq_dataset_free(ds);
    return fail(status);
  }

  aq_results* results = nullptr;
  status = aq_run(cfg, ds, &results);
  aq_config_free(cfg);
  if (status != AQ_OK) {
    aq_dataset_free(ds);
    return fail(status);
  }

  const int ranked = aq_results_ranked_count(results);
  const int failed = aq_results_failed_count(results);
  std::fprintf(stderr, "built %d models (%d failed)\n", ranked + failed, failed);

  status = aq_results_save(results, ds, opt.out_dir.c_str(), opt.top_k);
  if (status != AQ_OK) {
    aq_results_free(results);
    aq_dataset_free(ds);
    return fail(status);
  }

  if (ranked > 0) {
    char* card = nullptr;
    if (aq_results_card_json(results, 0, &card) == AQ_OK) {
      std::printf("best model: %s\n", card);
      aq_string_free(card);
    }
  }
  std::printf("run written to %s\n", opt.out_dir.c_str());

  aq_results_free(results);
  aq_dataset_free(ds);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"automated QSAR model building"};
  app.require_subcommand(1);

  BuildOptions build_opt;
  auto* build = app.add_subcommand("build", "sweep splits x methods and rank models");
  build->add_option("--input", build_opt.input, "learning set CSV (id,smiles,activity)")
      ->required();
  build->add_option("--out", build_opt.out_dir, "run output directory")->required();
  build->add_option("--frac-min", build_opt.frac_min, "smallest training fraction");
  build->add_option("--frac-max", build_opt.frac_max, "largest training fraction");
  build->add_option("--step", build_opt.step, "training fraction step");
  build->add_option("--per-interval", build_opt.per_interval,
                    "splits per fraction interval");
  build->add_option("--max-pair-corr", build_opt.max_pair_corr,
                    "descriptor pair correlation cutoff");
  build->add_option("--methods", build_opt.methods, "comma-separated method list");
  build->add_option("--fingerprints", build_opt.fingerprints,
                    "comma-separated fingerprint schemes for kpls/bayes");
  build->add_option("--seed", build_opt.seed, "master seed");
  build->add_option("--threads", build_opt.threads, "worker threads");
  build->add_option("--activity-transform", build_opt.activity_transform,
                    "none | ic50-nm | ic50-um");
  build->add_option("--top-k", build_opt.top_k, "models to persist");
  auto* thr = build->add_option("--classification-threshold",
                                build_opt.classification_threshold,
                                "pIC50 threshold enabling the bayes method");

  std::string model_path, predict_in, predict_out;
  auto* predict = app.add_subcommand("predict", "apply a saved model to new structures");
  predict->add_option("--model", model_path, "model archive (e.g. run/top.model)")
      ->required();
  predict->add_option("--input", predict_in, "CSV with id,smiles")->required();
  predict->add_option("--out", predict_out, "output CSV")->required();

  std::string report_run, report_out;
  auto* report = app.add_subcommand("report", "emit the report bundle for a run");
  report->add_option("--run", report_run, "run directory")->required();
  report->add_option("--out", report_out, "report output directory")->required();

  bool show_catalog = false;
  std::string inspect_run;
  auto* inspect = app.add_subcommand("inspect", "show the descriptor catalog or a run");
  inspect->add_flag("--catalog", show_catalog, "print the descriptor catalog CSV");
  inspect->add_option("--run", inspect_run, "print a run summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (build->parsed()) {
    build_opt.has_threshold = thr->count() > 0;
    return run_build(build_opt);
  }

  if (predict->parsed()) {
    aq_model* model = nullptr;
    aq_status status = aq_model_load(model_path.c_str(), &model);
    if (status != AQ_OK) return fail(status);
    status = aq_model_predict_csv(model, predict_in.c_str(), predict_out.c_str());
    aq_model_free(model);
    if (status != AQ_OK) return fail(status);
    std::printf("predictions written to %s\n", predict_out.c_str());
    return 0;
  }

  if (report->parsed()) {
    aq_status status = aq_report(report_run.c_str(), report_out.c_str());
    if (status != AQ_OK) return fail(status);
    std::printf("report written to %s\n", report_out.c_str());
    return 0;
  }

  if (inspect->parsed()) {
    if (show_catalog == (inspect_run.empty() ? false : true)) {
      std::fprintf(stderr, "error: inspect needs exactly one of --catalog or --run\n");
      return 1;
    }
    char* text = nullptr;
    aq_status status = show_catalog ? aq_catalog_csv(&text)
                                    : aq_run_summary(inspect_run.c_str(), &text);
    if (status != AQ_OK) return fail(status);
    std::fputs(text, stdout);
    aq_string_free(text);
    return 0;
  }

  return 1;
}
