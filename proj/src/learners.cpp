#include "autoqsar/learners.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "autoqsar/descriptors.hpp"
#include "autoqsar/errors.hpp"
#include "autoqsar/stable_hash.hpp"
#include "learners_detail.hpp"

namespace autoqsar {

namespace {

constexpr double kEps = 1e-12;
constexpr int kCvFolds = 5;
constexpr int kComponentCap = 10;

bool is_latent(Method m) {
  return m == Method::PLS || m == Method::PCR || m == Method::KPLS;
}

Eigen::VectorXd subset(const Eigen::VectorXd& v, const std::vector<int>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(idx[i]);
  return out;
}

Eigen::MatrixXd subset_rows(const Eigen::MatrixXd& m, const std::vector<int>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = m.row(idx[i]);
  return out;
}

std::vector<const Fingerprint*> fp_pointers(const std::vector<Fingerprint>& fps) {
  std::vector<const Fingerprint*> out;
  out.reserve(fps.size());
  for (const auto& f : fps) out.push_back(&f);
  return out;
}

// Seeded 5-fold assignment: indices (canonically ordered by row key when
// keys are given) shuffled and dealt round-robin.
std::vector<std::vector<int>> cv_folds(int n, std::uint64_t seed,
                                       const std::vector<std::string>& row_keys) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  if (static_cast<int>(row_keys.size()) == n) {
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return row_keys[static_cast<std::size_t>(a)] < row_keys[static_cast<std::size_t>(b)];
    });
  }
  StableRng rng(seed);
  rng.shuffle(order);
  std::vector<std::vector<int>> folds(kCvFolds);
  for (int i = 0; i < n; ++i) folds[static_cast<std::size_t>(i % kCvFolds)].push_back(order[static_cast<std::size_t>(i)]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::MLR: return "mlr";
    case Method::PLS: return "pls";
    case Method::PCR: return "pcr";
    case Method::KPLS: return "kpls";
    case Method::RP: return "rp";
    case Method::BAYES: return "bayes";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  for (Method m : {Method::MLR, Method::PLS, Method::PCR, Method::KPLS, Method::RP,
                   Method::BAYES}) {
    if (name == method_name(m)) return m;
  }
  throw ConfigError("unknown method: " + name);
}

const char* kernel_name(KernelKind k) {
  switch (k) {
    case KernelKind::Tanimoto: return "tanimoto";
    case KernelKind::Gaussian: return "gaussian";
    case KernelKind::Linear: return "linear";
  }
  return "?";
}

std::string FeatureSource::to_string() const {
  if (descriptors) return "descriptors";
  return std::string("fp:") + scheme_name(scheme) + ":" + std::to_string(param);
}

std::string ModelSpec::to_string() const {
  std::string s = method_name(method);
  s += "|";
  s += features.to_string();
  if (method == Method::KPLS) s += std::string("|") + kernel_name(kernel);
  if (method == Method::RP)
    s += "|depth" + std::to_string(tree_max_depth) + ",leaf" + std::to_string(tree_min_leaf);
  if (method == Method::BAYES && classification_threshold)
    s += "|thr" + std::to_string(*classification_threshold);
  return s;
}

void validate_spec(const ModelSpec& spec) {
  const bool fp_source = !spec.features.descriptors;
  switch (spec.method) {
    case Method::MLR:
    case Method::PLS:
    case Method::PCR:
    case Method::RP:
      if (fp_source)
        throw ConfigError(std::string(method_name(spec.method)) +
                          " requires the descriptor table");
      break;
    case Method::KPLS:
      if (fp_source && spec.kernel != KernelKind::Tanimoto)
        throw ConfigError("fingerprint KPLS uses the tanimoto kernel");
      break;
    case Method::BAYES:
      if (!spec.classification_threshold)
        throw ConfigError("bayes requires a classification threshold");
      break;
  }
  if (spec.max_components < 1) throw ConfigError("max components must be >= 1");
  if (spec.tree_min_leaf < 1 || spec.tree_max_depth < 1)
    throw ConfigError("invalid tree bounds");
}

Eigen::MatrixXd DescriptorPreprocessing::apply(const Eigen::MatrixXd& full) const {
  Eigen::MatrixXd out(full.rows(), static_cast<Eigen::Index>(retained.size()));
  for (std::size_t j = 0; j < retained.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) =
        (full.col(retained[j]).array() - mean(static_cast<Eigen::Index>(j))) /
        scale(static_cast<Eigen::Index>(j));
  }
  return out;
}

DescriptorPreprocessing fit_descriptor_preprocessing(const Eigen::MatrixXd& train_full,
                                                     double max_pair_correlation) {
  DescriptorPreprocessing prep;
  prep.retained = correlation_filter(train_full, max_pair_correlation);
  const auto nkeep = static_cast<Eigen::Index>(prep.retained.size());
  prep.mean.resize(nkeep);
  prep.scale.resize(nkeep);
  const double n = static_cast<double>(train_full.rows());
  for (Eigen::Index j = 0; j < nkeep; ++j) {
    const auto col = train_full.col(prep.retained[static_cast<std::size_t>(j)]);
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / (n - 1.0);
    prep.mean(j) = mean;
    prep.scale(j) = std::sqrt(var);
  }
  return prep;
}

double r_squared(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred,
                 double ref_mean) {
  if (y_true.size() == 0 || y_true.size() != y_pred.size())
    throw ConfigError("r_squared: empty or mismatched vectors");
  const double sse = (y_true - y_pred).squaredNorm();
  const double sst = (y_true.array() - ref_mean).square().sum();
  if (sst <= 0.0)
    throw DataError("metric undefined: zero variance about the reference mean");
  return 1.0 - sse / sst;
}

double balanced_accuracy(const std::vector<int>& truth, const std::vector<int>& pred) {
  if (truth.size() != pred.size() || truth.empty())
    throw ConfigError("balanced_accuracy: empty or mismatched vectors");
  long tp = 0, tn = 0, np = 0, nn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i]) {
      ++np;
      if (pred[i]) ++tp;
    } else {
      ++nn;
      if (!pred[i]) ++tn;
    }
  }
  if (np == 0 || nn == 0)
    throw DataError("balanced accuracy undefined: single-class truth");
  return 0.5 * (static_cast<double>(tp) / np + static_cast<double>(tn) / nn);
}

// --- MLR ---------------------------------------------------------------

namespace {

LinearModelState fit_mlr(const Eigen::MatrixXd& x_std, const Eigen::VectorXd& y) {
  const Eigen::Index n = x_std.rows();
  const Eigen::Index p = x_std.cols();
  const double y_mean = y.mean();
  const double sst = (y.array() - y_mean).square().sum();
  const int max_terms = static_cast<int>(n / 5);

  std::vector<int> selected;
  std::vector<bool> used(static_cast<std::size_t>(p), false);
  double best_adj = 0.0;  // intercept-only baseline
  Eigen::VectorXd best_coefs;

  while (static_cast<int>(selected.size()) < max_terms) {
    const int k = static_cast<int>(selected.size());
    if (n - k - 2 <= 0) break;
    int best_j = -1;
    double round_best = best_adj;
    Eigen::VectorXd round_coefs;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      Eigen::MatrixXd design(n, k + 2);
      design.col(0).setOnes();
      for (int c = 0; c < k; ++c) design.col(c + 1) = x_std.col(selected[static_cast<std::size_t>(c)]);
      design.col(k + 1) = x_std.col(j);
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
      if (qr.rank() < design.cols()) continue;  // rank-deficient step: skip
      Eigen::VectorXd coef = qr.solve(y);
      const double sse = (y - design * coef).squaredNorm();
      const double r2 = 1.0 - sse / sst;
      const double adj =
          1.0 - (1.0 - r2) * (static_cast<double>(n) - 1.0) /
                    (static_cast<double>(n) - (k + 1) - 1.0);
      if (adj > round_best + kEps) {
        round_best = adj;
        best_j = static_cast<int>(j);
        round_coefs = coef;
      }
    }
    if (best_j < 0) break;
    selected.push_back(best_j);
    used[static_cast<std::size_t>(best_j)] = true;
    best_adj = round_best;
    best_coefs = round_coefs;
  }

  LinearModelState state;
  state.beta = Eigen::VectorXd::Zero(p);
  if (selected.empty()) {
    state.intercept = y_mean;
  } else {
    state.intercept = best_coefs(0);
    for (std::size_t c = 0; c < selected.size(); ++c)
      state.beta(selected[c]) = best_coefs(static_cast<Eigen::Index>(c) + 1);
  }
  state.selected = std::move(selected);
  return state;
}

}  // namespace

// --- component selection -------------------------------------------------

namespace {

struct FoldEval {
  // q2 per component count (1-based index shifted down by one).
  std::vector<double> q2_by_ncomp;
};

// Evaluates one held-out fold for every component prefix. Kernel methods
// slice the caller's precomputed full-train kernel.
FoldEval eval_fold_latent(const ModelSpec& spec, const Eigen::MatrixXd& x_std,
                          const Eigen::MatrixXd& kernel_full,
                          const Eigen::VectorXd& y,
                          const std::vector<int>& hold,
                          const std::vector<int>& keep, int max_n) {
  FoldEval eval;
  eval.q2_by_ncomp.assign(static_cast<std::size_t>(max_n), -1e9);
  const Eigen::VectorXd y_keep = subset(y, keep);
  const Eigen::VectorXd y_hold = subset(y, hold);
  const double y_keep_mean = y_keep.mean();
  const double sst = (y_hold.array() - y_keep_mean).square().sum();
  if (sst <= 0.0) return eval;  // fold not evaluable; counts against every N

  if (spec.method == Method::KPLS) {
    const auto nk = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXd k_keep(nk, nk);
    for (Eigen::Index i = 0; i < nk; ++i)
      for (Eigen::Index j = 0; j < nk; ++j)
        k_keep(i, j) = kernel_full(keep[static_cast<std::size_t>(i)],
                                   keep[static_cast<std::size_t>(j)]);
    const Eigen::VectorXd col_mean = k_keep.colwise().mean();
    const double grand = col_mean.mean();
    Eigen::MatrixXd k_centered = k_keep;
    k_centered.colwise() -= col_mean;
    k_centered.rowwise() -= col_mean.transpose();
    k_centered.array() += grand;

    const Eigen::VectorXd yc = y_keep.array() - y_keep_mean;
    detail::KplsFit fit = detail::kpls_nipals(k_centered, yc, max_n);

    const auto nh = static_cast<Eigen::Index>(hold.size());
    Eigen::MatrixXd k_test(nh, nk);
    for (Eigen::Index i = 0; i < nh; ++i)
      for (Eigen::Index j = 0; j < nk; ++j)
        k_test(i, j) = kernel_full(hold[static_cast<std::size_t>(i)],
                                   keep[static_cast<std::size_t>(j)]);
    Eigen::MatrixXd k_test_centered = k_test;
    for (Eigen::Index i = 0; i < nh; ++i) {
      const double row_mean = k_test.row(i).mean();
      for (Eigen::Index j = 0; j < nk; ++j)
        k_test_centered(i, j) = k_test(i, j) - row_mean - col_mean(j) + grand;
    }
    for (int ncomp = 1; ncomp <= fit.components; ++ncomp) {
      const Eigen::VectorXd alpha = detail::kpls_alpha(fit, k_centered, yc, ncomp);
      const Eigen::VectorXd pred =
          (k_test_centered * alpha).array() + y_keep_mean;
      eval.q2_by_ncomp[static_cast<std::size_t>(ncomp - 1)] =
          1.0 - (y_hold - pred).squaredNorm() / sst;
    }
    return eval;
  }

  // PLS / PCR on fold-centered standardized descriptors.
  Eigen::MatrixXd x_keep = subset_rows(x_std, keep);
  Eigen::MatrixXd x_hold = subset_rows(x_std, hold);
  const Eigen::RowVectorXd fold_mean = x_keep.colwise().mean();
  x_keep.rowwise() -= fold_mean;
  x_hold.rowwise() -= fold_mean;
  const Eigen::VectorXd yc = y_keep.array() - y_keep_mean;

  if (spec.method == Method::PLS) {
    detail::PlsFit fit = detail::pls_nipals(x_keep, yc, max_n);
    for (int ncomp = 1; ncomp <= fit.components; ++ncomp) {
      const Eigen::VectorXd beta = detail::pls_beta(fit, ncomp);
      const Eigen::VectorXd pred = (x_hold * beta).array() + y_keep_mean;
      eval.q2_by_ncomp[static_cast<std::size_t>(ncomp - 1)] =
          1.0 - (y_hold - pred).squaredNorm() / sst;
    }
  } else {
    detail::PcrFit fit = detail::pcr_fit(x_keep, yc);
    const int limit = std::min(max_n, fit.rank);
    for (int ncomp = 1; ncomp <= limit; ++ncomp) {
      const Eigen::VectorXd beta = detail::pcr_beta(fit, ncomp);
      const Eigen::VectorXd pred = (x_hold * beta).array() + y_keep_mean;
      eval.q2_by_ncomp[static_cast<std::size_t>(ncomp - 1)] =
          1.0 - (y_hold - pred).squaredNorm() / sst;
    }
  }
  return eval;
}

}  // namespace

int select_components(const ModelSpec& spec, const FeatureBlock& train,
                      const Eigen::VectorXd& y, int max_n, std::uint64_t cv_seed,
                      const std::vector<std::string>& row_keys) {
  if (!is_latent(spec.method))
    throw ConfigError("component selection applies to PLS, PCR and KPLS only");
  const int n = static_cast<int>(train.rows());
  if (n < 10) throw DataError("component selection needs at least 10 training rows");
  if (max_n < 1) throw ConfigError("max_n must be >= 1");
  max_n = std::min({max_n, kComponentCap, n - 2});

  // Kernel methods evaluate folds by slicing one precomputed kernel.
  Eigen::MatrixXd kernel_full;
  double gamma = 1.0;
  if (spec.method == Method::KPLS) {
    if (spec.features.descriptors) {
      if (spec.kernel == KernelKind::Gaussian)
        gamma = detail::gaussian_gamma(train.descriptors);
      kernel_full = detail::kernel_block(spec.kernel, gamma, train.descriptors,
                                         train.descriptors);
    } else {
      auto ptrs = fp_pointers(train.fps);
      kernel_full = detail::kernel_block(spec.kernel, gamma, ptrs, ptrs);
    }
    max_n = std::min(max_n, n - 2);
  } else {
    max_n = std::min(max_n, static_cast<int>(train.descriptors.cols()));
  }
  if (max_n < 1) max_n = 1;

  const auto folds = cv_folds(n, cv_seed, row_keys);
  std::vector<double> mean_q2(static_cast<std::size_t>(max_n), 0.0);
  for (const auto& hold : folds) {
    if (hold.empty()) continue;
    std::vector<int> keep;
    keep.reserve(static_cast<std::size_t>(n) - hold.size());
    std::vector<bool> is_hold(static_cast<std::size_t>(n), false);
    for (int i : hold) is_hold[static_cast<std::size_t>(i)] = true;
    for (int i = 0; i < n; ++i)
      if (!is_hold[static_cast<std::size_t>(i)]) keep.push_back(i);

    FoldEval eval =
        eval_fold_latent(spec, train.descriptors, kernel_full, y, hold, keep, max_n);
    for (int c = 0; c < max_n; ++c)
      mean_q2[static_cast<std::size_t>(c)] +=
          eval.q2_by_ncomp[static_cast<std::size_t>(c)] / folds.size();
  }

  int best = 1;
  for (int c = 2; c <= max_n; ++c) {
    if (mean_q2[static_cast<std::size_t>(c - 1)] >
        mean_q2[static_cast<std::size_t>(best - 1)] + kEps)
      best = c;  // strict improvement: ties resolve to the smaller N
  }
  return best;
}

// --- fit/predict dispatch --------------------------------------------------

TrainedModel fit_model(const ModelSpec& spec, const FeatureBlock& train,
                       const Eigen::VectorXd& y, double max_pair_correlation,
                       std::uint64_t cv_seed, std::vector<std::string> training_ids) {
  validate_spec(spec);
  const int n = static_cast<int>(train.rows());
  if (n < 10) throw DataError("fit needs at least 10 training rows");
  if (y.size() != n) throw ConfigError("feature/target row mismatch");

  const double y_mean = y.mean();
  if ((y.array() - y_mean).abs().maxCoeff() < kEps)
    throw DataError("constant training activities");

  TrainedModel model;
  model.spec = spec;
  model.training_ids = std::move(training_ids);

  FeatureBlock preprocessed;
  if (spec.features.descriptors) {
    model.prep = fit_descriptor_preprocessing(train.descriptors, max_pair_correlation);
    preprocessed.descriptors = model.prep.apply(train.descriptors);
  } else {
    preprocessed.fps = train.fps;
  }

  switch (spec.method) {
    case Method::MLR: {
      model.state = fit_mlr(preprocessed.descriptors, y);
      break;
    }
    case Method::PLS: {
      const int ncomp = select_components(spec, preprocessed, y,
                                          spec.max_components, cv_seed,
                                          model.training_ids);
      Eigen::MatrixXd xc = preprocessed.descriptors;  // standardized => centered
      detail::PlsFit fit = detail::pls_nipals(xc, y.array() - y_mean, ncomp);
      if (fit.components < 1) throw DataError("PLS found no usable component");
      LinearModelState state;
      state.beta = detail::pls_beta(fit, fit.components);
      state.intercept = y_mean;
      model.components = fit.components;
      model.state = std::move(state);
      break;
    }
    case Method::PCR: {
      const int ncomp = select_components(spec, preprocessed, y,
                                          spec.max_components, cv_seed,
                                          model.training_ids);
      detail::PcrFit fit = detail::pcr_fit(preprocessed.descriptors, y.array() - y_mean);
      if (fit.rank < 1) throw DataError("PCR: zero-rank feature block");
      const int use = std::min(ncomp, fit.rank);
      LinearModelState state;
      state.beta = detail::pcr_beta(fit, use);
      state.intercept = y_mean;
      model.components = use;
      model.state = std::move(state);
      break;
    }
    case Method::KPLS: {
      KplsModelState state;
      state.kernel = spec.features.descriptors ? spec.kernel : KernelKind::Tanimoto;
      Eigen::MatrixXd kernel;
      if (spec.features.descriptors) {
        if (state.kernel == KernelKind::Gaussian)
          state.gamma = detail::gaussian_gamma(preprocessed.descriptors);
        state.ref_x = preprocessed.descriptors;
        kernel = detail::kernel_block(state.kernel, state.gamma, state.ref_x, state.ref_x);
      } else {
        state.ref_fps = preprocessed.fps;
        auto ptrs = fp_pointers(state.ref_fps);
        kernel = detail::kernel_block(state.kernel, state.gamma, ptrs, ptrs);
      }
      const int ncomp = select_components(spec, preprocessed, y,
                                          spec.max_components, cv_seed,
                                          model.training_ids);

      state.train_col_mean = kernel.colwise().mean();
      state.grand_mean = state.train_col_mean.mean();
      Eigen::MatrixXd kc = kernel;
      kc.rowwise() -= state.train_col_mean.transpose();
      kc.colwise() -= state.train_col_mean;
      kc.array() += state.grand_mean;

      state.y_mean = y_mean;
      const Eigen::VectorXd yc = y.array() - y_mean;
      detail::KplsFit fit = detail::kpls_nipals(kc, yc, ncomp);
      if (fit.components < 1) throw DataError("KPLS found no usable component");
      state.alpha = detail::kpls_alpha(fit, kc, yc, fit.components);
      model.components = fit.components;
      model.state = std::move(state);
      break;
    }
    case Method::RP: {
      model.state = detail::fit_tree(preprocessed.descriptors, y, spec.tree_max_depth,
                                     spec.tree_min_leaf);
      break;
    }
    case Method::BAYES: {
      const double threshold = *spec.classification_threshold;
      std::vector<int> active(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) active[static_cast<std::size_t>(i)] = y(i) >= threshold;
      std::vector<std::vector<std::uint8_t>> bits;
      BayesModelState state;
      if (spec.features.descriptors) {
        // Median binarization of the standardized descriptor block.
        const Eigen::MatrixXd& x = preprocessed.descriptors;
        Eigen::VectorXd median(x.cols());
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
          std::vector<double> col(x.col(j).data(), x.col(j).data() + x.rows());
          std::sort(col.begin(), col.end());
          median(j) = col[(col.size() - 1) / 2];
        }
        bits.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
          auto& row = bits[static_cast<std::size_t>(i)];
          row.resize(static_cast<std::size_t>(x.cols()));
          for (Eigen::Index j = 0; j < x.cols(); ++j)
            row[static_cast<std::size_t>(j)] = x(i, j) > median(j) ? 1 : 0;
        }
        state = detail::fit_bayes(bits, active, spec.laplace_alpha, threshold);
        state.on_descriptors = true;
        state.median = median;
      } else {
        bits.reserve(static_cast<std::size_t>(n));
        for (const Fingerprint& fp : preprocessed.fps) bits.push_back(fold_binary(fp));
        state = detail::fit_bayes(bits, active, spec.laplace_alpha, threshold);
      }
      model.state = std::move(state);
      break;
    }
  }
  return model;
}

Eigen::VectorXd predict(const TrainedModel& model, const FeatureBlock& features) {
  const Eigen::Index n = features.rows();
  if (model.spec.features.descriptors) {
    if (features.descriptors.size() == 0)
      throw ConfigError("model expects the descriptor table");
    if (!model.prep.empty() &&
        features.descriptors.cols() <
            static_cast<Eigen::Index>(*std::max_element(model.prep.retained.begin(),
                                                        model.prep.retained.end())) +
                1)
      throw ConfigError("descriptor block narrower than the model's catalog");
  } else {
    if (features.fps.empty() && n > 0)
      throw ConfigError("model expects fingerprints");
    for (const Fingerprint& fp : features.fps) {
      if (fp.scheme != model.spec.features.scheme || fp.param != model.spec.features.param)
        throw ConfigError("fingerprint scheme/params do not match the model");
    }
  }

  if (const auto* linear = std::get_if<LinearModelState>(&model.state)) {
    const Eigen::MatrixXd x = model.prep.apply(features.descriptors);
    return (x * linear->beta).array() + linear->intercept;
  }
  if (const auto* kpls = std::get_if<KplsModelState>(&model.state)) {
    Eigen::MatrixXd k_test;
    if (model.spec.features.descriptors) {
      const Eigen::MatrixXd x = model.prep.apply(features.descriptors);
      k_test = detail::kernel_block(kpls->kernel, kpls->gamma, x, kpls->ref_x);
    } else {
      auto test_ptrs = fp_pointers(features.fps);
      auto ref_ptrs = fp_pointers(kpls->ref_fps);
      k_test = detail::kernel_block(kpls->kernel, kpls->gamma, test_ptrs, ref_ptrs);
    }
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double row_mean = k_test.row(i).mean();
      double acc = 0.0;
      for (Eigen::Index j = 0; j < k_test.cols(); ++j)
        acc += (k_test(i, j) - row_mean - kpls->train_col_mean(j) + kpls->grand_mean) *
               kpls->alpha(j);
      out(i) = acc + kpls->y_mean;
    }
    return out;
  }
  if (const auto* tree = std::get_if<TreeModelState>(&model.state)) {
    const Eigen::MatrixXd x = model.prep.apply(features.descriptors);
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i)
      out(i) = detail::tree_predict_row(*tree, x.row(i));
    return out;
  }
  const auto& bayes = std::get<BayesModelState>(model.state);
  Eigen::VectorXd out(n);
  if (bayes.on_descriptors) {
    const Eigen::MatrixXd x = model.prep.apply(features.descriptors);
    for (Eigen::Index i = 0; i < n; ++i) {
      std::vector<std::uint8_t> bits(static_cast<std::size_t>(x.cols()));
      for (Eigen::Index j = 0; j < x.cols(); ++j)
        bits[static_cast<std::size_t>(j)] = x(i, j) > bayes.median(j) ? 1 : 0;
      out(i) = detail::bayes_p_active(bayes, bits);
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i)
      out(i) = detail::bayes_p_active(bayes, fold_binary(features.fps[static_cast<std::size_t>(i)]));
  }
  return out;
}

std::uint64_t preprocessing_digest(const TrainedModel& model) {
  std::uint64_t h = mix64(0x70726570ULL);
  auto add_double = [&](double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    h = hash_combine(h, bits);
  };
  for (int idx : model.prep.retained) h = hash_combine(h, static_cast<std::uint64_t>(idx));
  for (Eigen::Index i = 0; i < model.prep.mean.size(); ++i) add_double(model.prep.mean(i));
  for (Eigen::Index i = 0; i < model.prep.scale.size(); ++i) add_double(model.prep.scale(i));
  h = hash_combine(h, static_cast<std::uint64_t>(model.components));
  if (const auto* kpls = std::get_if<KplsModelState>(&model.state)) {
    add_double(kpls->gamma);
    add_double(kpls->grand_mean);
    add_double(kpls->y_mean);
    for (Eigen::Index i = 0; i < kpls->train_col_mean.size(); ++i)
      add_double(kpls->train_col_mean(i));
  }
  return h;
}

}  // namespace autoqsar
