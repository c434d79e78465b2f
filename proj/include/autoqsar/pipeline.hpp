#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "autoqsar/dataset.hpp"
#include "autoqsar/learners.hpp"

namespace autoqsar {

struct PipelineConfig {
  double frac_min = 0.70;
  double frac_max = 0.80;
  double step = 0.01;
  int models_per_interval = 99;
  double max_pair_correlation = 0.99;
  std::vector<ModelSpec> roster;
  std::uint64_t master_seed = 0;
  int thread_count = 1;
  std::optional<double> classification_threshold;

  void validate() const;  // throws ConfigError
  int intervals() const;
};

// Expands method names x fingerprint schemes into the roster: descriptor
// methods once, KPLS/Bayes additionally per configured fingerprint scheme.
// Bayes enters only when a classification threshold is set.
std::vector<ModelSpec> expand_roster(const std::vector<std::string>& methods,
                                     const std::vector<std::string>& fingerprint_schemes,
                                     std::optional<double> classification_threshold);

struct ScoreCard {
  std::string model_id;   // hex of hash(spec text, split seed)
  int interval = 0;
  int replicate = 0;
  int roster_index = 0;
  double train_fraction = 0.0;
  std::uint64_t split_seed = 0;
  std::string method;
  std::string feature_source;
  double r2_train = 0.0;  // balanced accuracy (train) for classification cards
  double q2_test = 0.0;   // balanced accuracy (test) for classification cards
  double score = 0.0;
  int components = 0;
  bool classification = false;
  bool failed = false;
  std::string failure;
  double wall_seconds = 0.0;           // excluded from ranked manifests
  std::uint64_t preprocess_digest = 0; // leakage audit; excluded from manifests
};

struct RankedModels {
  std::vector<ScoreCard> ranked;  // successful cards, best first
  std::vector<ScoreCard> failed;  // unranked failures, unit order
  PipelineConfig config;
  std::uint64_t dataset_digest = 0;
  std::string catalog_version;
  double total_wall_seconds = 0.0;
};

// The ranking score: rewards accuracy on both sets, penalizes the
// train/test gap.
double score(double r2, double q2);

// Descending (score, q2, model_id): a stable total order.
void sort_ranked(std::vector<ScoreCard>& cards);

// Molecule-derived features for the whole dataset, computed once per run.
struct FeatureCache {
  Eigen::MatrixXd descriptors;  // records x catalog
  std::map<std::string, std::vector<Fingerprint>> fingerprints;  // key: "scheme:param"
  std::map<std::string, int> row_of_id;
};

FeatureCache build_feature_cache(const Dataset& ds, const std::vector<ModelSpec>& roster);

// One (split, spec) work unit: fit on the training rows, score both sets.
// Fit exceptions become failed cards; keep_model controls whether the
// fitted model is returned (the sweep drops them, refits materialize them).
struct UnitResult {
  ScoreCard card;
  std::optional<TrainedModel> model;
};

UnitResult evaluate_unit(const Dataset& ds, const FeatureCache& cache,
                         const SplitSpec& split, int interval, int replicate,
                         const ModelSpec& spec, int roster_index,
                         const PipelineConfig& config, bool keep_model);

// The full sweep: split grid x roster, deterministic in
// (dataset, config, master_seed) regardless of thread_count.
RankedModels run_pipeline(const PipelineConfig& config, const Dataset& ds);

// Rebuilds the trained model behind a scorecard (fits are deterministic).
TrainedModel refit_card(const RankedModels& rm, const Dataset& ds, const ScoreCard& card);

// Features for a molecule list in the shape the model expects.
FeatureBlock features_for(const TrainedModel& model, const std::vector<Molecule>& mols);

}  // namespace autoqsar
