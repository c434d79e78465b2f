#pragma once

// Internal learner machinery shared between the learner translation units.
// Not installed; include/autoqsar/learners.hpp is the public surface.

#include <vector>

#include <Eigen/Dense>

#include "autoqsar/learners.hpp"

namespace autoqsar::detail {

// NIPALS PLS1 on a centered x block. Stores per-component loadings so any
// prefix 1..components can be turned into coefficients (used by the CV).
struct PlsFit {
  Eigen::MatrixXd w;  // p x c weights
  Eigen::MatrixXd p;  // p x c loadings
  Eigen::VectorXd q;  // c response loadings
  int components = 0;
};

PlsFit pls_nipals(const Eigen::MatrixXd& x_centered, const Eigen::VectorXd& y_centered,
                  int max_comp);
Eigen::VectorXd pls_beta(const PlsFit& fit, int ncomp);

// PCA regression pieces from the thin SVD of the centered x block.
struct PcrFit {
  Eigen::MatrixXd v;      // p x rank right singular vectors
  Eigen::VectorXd gamma;  // per-component regression weight on scores
  int rank = 0;
};

PcrFit pcr_fit(const Eigen::MatrixXd& x_centered, const Eigen::VectorXd& y_centered);
Eigen::VectorXd pcr_beta(const PcrFit& fit, int ncomp);

// Kernel NIPALS on a centered kernel block, per-prefix dual coefficients.
struct KplsFit {
  Eigen::MatrixXd t;  // n x c orthonormal scores
  Eigen::MatrixXd u;  // n x c response scores
  int components = 0;
};

KplsFit kpls_nipals(const Eigen::MatrixXd& k_centered, const Eigen::VectorXd& y_centered,
                    int max_comp);
Eigen::VectorXd kpls_alpha(const KplsFit& fit, const Eigen::MatrixXd& k_centered,
                           const Eigen::VectorXd& y_centered, int ncomp);

// Kernel blocks: rows of `a` against rows of `b`.
Eigen::MatrixXd kernel_block(KernelKind kind, double gamma,
                             const std::vector<const Fingerprint*>& a,
                             const std::vector<const Fingerprint*>& b);
Eigen::MatrixXd kernel_block(KernelKind kind, double gamma, const Eigen::MatrixXd& a,
                             const Eigen::MatrixXd& b);

// 1 / median^2 of pairwise Euclidean distances (lower median); 1.0 when the
// median vanishes.
double gaussian_gamma(const Eigen::MatrixXd& x_std);

// CART regression tree with variance-reduction splits.
TreeModelState fit_tree(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        int max_depth, int min_leaf);
double tree_predict_row(const TreeModelState& tree, const Eigen::RowVectorXd& row);

// Bernoulli naive Bayes over binary features.
BayesModelState fit_bayes(const std::vector<std::vector<std::uint8_t>>& bits,
                          const std::vector<int>& active, double alpha,
                          double threshold);
double bayes_p_active(const BayesModelState& state, const std::vector<std::uint8_t>& bits);

}  // namespace autoqsar::detail
