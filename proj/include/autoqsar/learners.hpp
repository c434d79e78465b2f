#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "autoqsar/fingerprints.hpp"

namespace autoqsar {

enum class Method : std::uint8_t { MLR, PLS, PCR, KPLS, RP, BAYES };

const char* method_name(Method m);
Method method_from_name(const std::string& name);  // throws ConfigError

enum class KernelKind : std::uint8_t { Tanimoto, Gaussian, Linear };
const char* kernel_name(KernelKind k);

// What a model consumes: the descriptor table or one fingerprint scheme.
struct FeatureSource {
  bool descriptors = true;
  FingerprintScheme scheme = FingerprintScheme::Radial;
  int param = 3;

  static FeatureSource descriptor_table() { return FeatureSource{}; }
  static FeatureSource fingerprints(FingerprintScheme s, int p) {
    return FeatureSource{false, s, p};
  }
  std::string to_string() const;
  bool operator==(const FeatureSource&) const = default;
};

struct ModelSpec {
  Method method = Method::PLS;
  FeatureSource features;
  KernelKind kernel = KernelKind::Tanimoto;  // KPLS only; default depends on features
  int max_components = 10;
  int tree_max_depth = 8;
  int tree_min_leaf = 5;
  double laplace_alpha = 1.0;
  std::optional<double> classification_threshold;  // required for BAYES

  std::string to_string() const;  // stable key, participates in model ids
};

// Throws ConfigError when the method/feature combination is not allowed
// (only KPLS and Bayes accept fingerprints).
void validate_spec(const ModelSpec& spec);

// Feature matrix or fingerprint list for a set of molecules, row-aligned.
struct FeatureBlock {
  Eigen::MatrixXd descriptors;      // molecules x full catalog (descriptor sources)
  std::vector<Fingerprint> fps;     // fingerprint sources

  Eigen::Index rows() const {
    return descriptors.size() > 0 ? descriptors.rows()
                                  : static_cast<Eigen::Index>(fps.size());
  }
};

// Correlation filter indices plus training-row standardization.
struct DescriptorPreprocessing {
  std::vector<int> retained;  // catalog column indices, filter order
  Eigen::VectorXd mean;       // per retained column
  Eigen::VectorXd scale;      // sample std, always > 0

  Eigen::MatrixXd apply(const Eigen::MatrixXd& full) const;
  bool empty() const { return retained.empty(); }
};

DescriptorPreprocessing fit_descriptor_preprocessing(const Eigen::MatrixXd& train_full,
                                                     double max_pair_correlation);

// --- fitted state per family ---------------------------------------------

struct LinearModelState {  // MLR, PLS, PCR: prediction = x_std . beta + intercept
  Eigen::VectorXd beta;    // over retained standardized columns
  double intercept = 0.0;
  std::vector<int> selected;  // MLR: retained-column positions chosen stepwise
};

struct KplsModelState {
  KernelKind kernel = KernelKind::Tanimoto;
  double gamma = 1.0;                   // Gaussian only
  std::vector<Fingerprint> ref_fps;     // Tanimoto reference set
  Eigen::MatrixXd ref_x;                // standardized rows for Gaussian/Linear
  Eigen::VectorXd alpha;                // dual coefficients
  Eigen::VectorXd train_col_mean;       // (1/n) K 1
  double grand_mean = 0.0;
  double y_mean = 0.0;
};

struct TreeNode {
  int feature = -1;         // -1 marks a leaf
  double threshold = 0.0;   // go left when x <= threshold
  int left = -1;
  int right = -1;
  double value = 0.0;       // leaf mean
  int depth = 0;
  int count = 0;            // training rows in the node
};

struct TreeModelState {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
};

struct BayesModelState {
  double threshold = 0.0;              // activity >= threshold is "active"
  bool on_descriptors = false;
  Eigen::VectorXd median;              // binarization medians (descriptor path)
  std::vector<int> included;           // bit indices observed in training
  Eigen::VectorXd log_p1_active;       // per included bit log P(bit=1 | active)
  Eigen::VectorXd log_p0_active;
  Eigen::VectorXd log_p1_inactive;
  Eigen::VectorXd log_p0_inactive;
  double log_prior_active = 0.0;
  double log_prior_inactive = 0.0;
  int bits = 0;                        // full feature width
};

struct TrainedModel {
  ModelSpec spec;
  DescriptorPreprocessing prep;  // descriptor sources only
  int components = 0;            // PLS/PCR/KPLS
  std::variant<LinearModelState, KplsModelState, TreeModelState, BayesModelState> state;
  std::vector<std::string> training_ids;
};

// --- operations ------------------------------------------------------------

// 5-fold cross-validation over the training block, seeded fold assignment;
// returns the component count with the best mean CV q2, smallest on ties.
// Latent-variable methods only; needs >= 10 training rows. When row_keys
// are given (one per row, unique) the fold assignment is canonicalized on
// them, making the choice independent of row order.
int select_components(const ModelSpec& spec, const FeatureBlock& train,
                      const Eigen::VectorXd& y, int max_n, std::uint64_t cv_seed,
                      const std::vector<std::string>& row_keys = {});

// Full fit: preprocessing (descriptor sources), component selection when the
// method has components, then the final model on all training rows.
// Fit problems throw; the pipeline converts them to failed scorecards.
TrainedModel fit_model(const ModelSpec& spec, const FeatureBlock& train,
                       const Eigen::VectorXd& y, double max_pair_correlation,
                       std::uint64_t cv_seed,
                       std::vector<std::string> training_ids = {});

// Pure function of the stored state. For BAYES the result is P(active).
Eigen::VectorXd predict(const TrainedModel& model, const FeatureBlock& features);

// Coefficient of determination about ref_mean: training r2 passes the
// training mean of the same rows; test q2 passes the training mean as well.
// Throws DataError when the reference sum of squares is zero.
double r_squared(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred,
                 double ref_mean);

// Balanced accuracy for the Bayes classification scorecard.
double balanced_accuracy(const std::vector<int>& truth, const std::vector<int>& pred);

// Digest of everything derived from training rows (filter, means, scales,
// kernel centering, component count) for the leakage audit.
std::uint64_t preprocessing_digest(const TrainedModel& model);

}  // namespace autoqsar
