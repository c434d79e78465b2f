#include "autoqsar/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "autoqsar/descriptors.hpp"
#include "autoqsar/errors.hpp"
#include "autoqsar/stable_hash.hpp"

namespace autoqsar {

namespace {

std::string hex16(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

std::string fp_cache_key(const FeatureSource& fs) {
  return std::string(scheme_name(fs.scheme)) + ":" + std::to_string(fs.param);
}

std::uint64_t unit_cv_seed(std::uint64_t split_seed, const ModelSpec& spec) {
  return hash_combine(split_seed, hash_bytes(spec.to_string()));
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(frac_min >= 0.5 && frac_max <= 0.95 && frac_min <= frac_max))
    throw ConfigError("training fraction grid must sit inside [0.5,0.95]");
  if (step <= 0.0) throw ConfigError("grid step must be positive");
  if (models_per_interval < 1) throw ConfigError("models per interval must be >= 1");
  if (!(max_pair_correlation > 0.0 && max_pair_correlation <= 1.0))
    throw ConfigError("max pair correlation must be in (0,1]");
  if (roster.empty()) throw ConfigError("method roster is empty");
  if (thread_count < 1) throw ConfigError("thread count must be >= 1");
  for (const ModelSpec& spec : roster) validate_spec(spec);
}

int PipelineConfig::intervals() const {
  return grid_interval_count(frac_min, frac_max, step);
}

std::vector<ModelSpec> expand_roster(const std::vector<std::string>& methods,
                                     const std::vector<std::string>& fingerprint_schemes,
                                     std::optional<double> classification_threshold) {
  std::vector<ModelSpec> roster;
  for (const std::string& name : methods) {
    const Method method = method_from_name(name);
    if (method == Method::BAYES && !classification_threshold)
      throw ConfigError("bayes requires --classification-threshold");

    ModelSpec base;
    base.method = method;
    base.classification_threshold =
        method == Method::BAYES ? classification_threshold : std::nullopt;

    if (method == Method::KPLS || method == Method::BAYES) {
      // Descriptor variant plus one variant per fingerprint scheme.
      ModelSpec desc = base;
      desc.features = FeatureSource::descriptor_table();
      if (method == Method::KPLS) desc.kernel = KernelKind::Gaussian;
      roster.push_back(desc);
      for (const std::string& scheme : fingerprint_schemes) {
        ModelSpec fp = base;
        const FingerprintScheme s = scheme_from_name(scheme);
        fp.features = FeatureSource::fingerprints(s, default_fingerprint_param(s));
        fp.kernel = KernelKind::Tanimoto;
        roster.push_back(fp);
      }
    } else {
      base.features = FeatureSource::descriptor_table();
      roster.push_back(base);
    }
  }
  return roster;
}

double score(double r2, double q2) {
  return 0.5 * (r2 + q2) - 0.25 * std::abs(r2 - q2);
}

void sort_ranked(std::vector<ScoreCard>& cards) {
  std::sort(cards.begin(), cards.end(), [](const ScoreCard& a, const ScoreCard& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.q2_test != b.q2_test) return a.q2_test > b.q2_test;
    return a.model_id < b.model_id;
  });
}

FeatureCache build_feature_cache(const Dataset& ds, const std::vector<ModelSpec>& roster) {
  FeatureCache cache;
  std::vector<Molecule> mols;
  mols.reserve(ds.size());
  for (const DataRecord& r : ds.records) mols.push_back(parse_smiles(r.smiles));

  const auto& catalog = DescriptorCatalog::instance();
  cache.descriptors.resize(static_cast<Eigen::Index>(ds.size()),
                           static_cast<Eigen::Index>(catalog.size()));
  for (std::size_t i = 0; i < mols.size(); ++i) {
    const DescriptorVector v = compute_descriptors(mols[i], ds.records[i].id);
    for (std::size_t j = 0; j < v.values.size(); ++j)
      cache.descriptors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          v.values[j];
  }

  for (const ModelSpec& spec : roster) {
    if (spec.features.descriptors) continue;
    const std::string key = fp_cache_key(spec.features);
    if (cache.fingerprints.count(key)) continue;
    std::vector<Fingerprint> fps;
    fps.reserve(mols.size());
    for (const Molecule& mol : mols)
      fps.push_back(fingerprint(mol, spec.features.scheme, spec.features.param));
    cache.fingerprints.emplace(key, std::move(fps));
  }

  for (std::size_t i = 0; i < ds.size(); ++i)
    cache.row_of_id.emplace(ds.records[i].id, static_cast<int>(i));
  return cache;
}

namespace {

FeatureBlock block_for_ids(const FeatureCache& cache, const FeatureSource& source,
                           const std::vector<std::string>& ids) {
  FeatureBlock block;
  if (source.descriptors) {
    block.descriptors.resize(static_cast<Eigen::Index>(ids.size()),
                             cache.descriptors.cols());
    for (std::size_t i = 0; i < ids.size(); ++i)
      block.descriptors.row(static_cast<Eigen::Index>(i)) =
          cache.descriptors.row(cache.row_of_id.at(ids[i]));
  } else {
    const auto& fps = cache.fingerprints.at(fp_cache_key(source));
    block.fps.reserve(ids.size());
    for (const std::string& id : ids)
      block.fps.push_back(fps[static_cast<std::size_t>(cache.row_of_id.at(id))]);
  }
  return block;
}

Eigen::VectorXd activities_for_ids(const Dataset& ds, const FeatureCache& cache,
                                   const std::vector<std::string>& ids) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(ids.size()));
  for (std::size_t i = 0; i < ids.size(); ++i)
    y(static_cast<Eigen::Index>(i)) =
        ds.records[static_cast<std::size_t>(cache.row_of_id.at(ids[i]))].activity;
  return y;
}

double classification_metric(const Eigen::VectorXd& y, const Eigen::VectorXd& p,
                             double threshold) {
  std::vector<int> truth, pred;
  truth.reserve(static_cast<std::size_t>(y.size()));
  pred.reserve(static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    truth.push_back(y(i) >= threshold ? 1 : 0);
    pred.push_back(p(i) >= 0.5 ? 1 : 0);
  }
  return balanced_accuracy(truth, pred);
}

}  // namespace

UnitResult evaluate_unit(const Dataset& ds, const FeatureCache& cache,
                         const SplitSpec& split, int interval, int replicate,
                         const ModelSpec& spec, int roster_index,
                         const PipelineConfig& config, bool keep_model) {
  const auto start = std::chrono::steady_clock::now();

  UnitResult result;
  ScoreCard& card = result.card;
  card.model_id = hex16(hash_combine(hash_bytes(spec.to_string()), split.seed));
  card.interval = interval;
  card.replicate = replicate;
  card.roster_index = roster_index;
  card.train_fraction = split.train_fraction;
  card.split_seed = split.seed;
  card.method = method_name(spec.method);
  card.feature_source = spec.features.to_string();
  card.classification = spec.method == Method::BAYES;

  try {
    FeatureBlock train = block_for_ids(cache, spec.features, split.train_ids);
    FeatureBlock test = block_for_ids(cache, spec.features, split.test_ids);
    const Eigen::VectorXd y_train = activities_for_ids(ds, cache, split.train_ids);
    const Eigen::VectorXd y_test = activities_for_ids(ds, cache, split.test_ids);

    TrainedModel model = fit_model(spec, train, y_train, config.max_pair_correlation,
                                   unit_cv_seed(split.seed, spec), split.train_ids);
    const Eigen::VectorXd pred_train = predict(model, train);
    const Eigen::VectorXd pred_test = predict(model, test);

    if (card.classification) {
      const double threshold = *spec.classification_threshold;
      card.r2_train = classification_metric(y_train, pred_train, threshold);
      card.q2_test = classification_metric(y_test, pred_test, threshold);
    } else {
      const double train_mean = y_train.mean();
      card.r2_train = r_squared(y_train, pred_train, train_mean);
      card.q2_test = r_squared(y_test, pred_test, train_mean);
    }
    if (!std::isfinite(card.r2_train) || !std::isfinite(card.q2_test))
      throw DataError("non-finite metrics");
    card.score = score(card.r2_train, card.q2_test);
    card.components = model.components;
    card.preprocess_digest = preprocessing_digest(model);
    if (keep_model) result.model = std::move(model);
  } catch (const std::exception& e) {
    card.failed = true;
    card.failure = e.what();
    card.r2_train = 0.0;
    card.q2_test = 0.0;
    card.score = 0.0;
  }

  card.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

RankedModels run_pipeline(const PipelineConfig& config, const Dataset& ds) {
  const auto run_start = std::chrono::steady_clock::now();
  config.validate();
  if (ds.size() < 12)
    throw DataError("dataset too small for the pipeline: " +
                    std::to_string(ds.size()) + " records (minimum 12)");

  const FeatureCache cache = build_feature_cache(ds, config.roster);
  const std::vector<SplitSpec> splits =
      split_grid(ds, config.frac_min, config.frac_max, config.step,
                 config.models_per_interval, config.master_seed);

  const std::size_t n_units = splits.size() * config.roster.size();
  std::vector<ScoreCard> cards(n_units);

  // Deterministic unit order (interval, replicate, method); results land by
  // index so any scheduling produces the same output.
  auto run_unit = [&](std::size_t u) {
    const std::size_t split_idx = u / config.roster.size();
    const std::size_t method_idx = u % config.roster.size();
    const int interval = static_cast<int>(split_idx) / config.models_per_interval;
    const int replicate = static_cast<int>(split_idx) % config.models_per_interval;
    UnitResult res = evaluate_unit(ds, cache, splits[split_idx], interval, replicate,
                                   config.roster[method_idx],
                                   static_cast<int>(method_idx), config,
                                   /*keep_model=*/false);
    cards[u] = std::move(res.card);
  };

  if (config.thread_count <= 1 || n_units < 2) {
    for (std::size_t u = 0; u < n_units; ++u) run_unit(u);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      while (true) {
        const std::size_t u = next.fetch_add(1);
        if (u >= n_units) break;
        run_unit(u);
      }
    };
    std::vector<std::thread> threads;
    const int n_threads = std::min<int>(config.thread_count,
                                        static_cast<int>(n_units));
    threads.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }

  RankedModels rm;
  rm.config = config;
  rm.dataset_digest = dataset_digest(ds);
  rm.catalog_version = DescriptorCatalog::instance().version();
  for (ScoreCard& card : cards)
    (card.failed ? rm.failed : rm.ranked).push_back(std::move(card));
  sort_ranked(rm.ranked);
  rm.total_wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - run_start)
          .count();
  return rm;
}

TrainedModel refit_card(const RankedModels& rm, const Dataset& ds, const ScoreCard& card) {
  if (card.failed) throw ConfigError("cannot refit a failed scorecard");
  const ModelSpec& spec =
      rm.config.roster.at(static_cast<std::size_t>(card.roster_index));
  const FeatureCache cache = build_feature_cache(ds, {spec});
  const SplitSpec split = stratified_split(ds, card.train_fraction, card.split_seed);
  UnitResult res = evaluate_unit(ds, cache, split, card.interval, card.replicate, spec,
                                 card.roster_index, rm.config, /*keep_model=*/true);
  if (res.card.failed) throw Error("refit failed: " + res.card.failure);
  return std::move(*res.model);
}

FeatureBlock features_for(const TrainedModel& model, const std::vector<Molecule>& mols) {
  FeatureBlock block;
  if (model.spec.features.descriptors) {
    const auto& catalog = DescriptorCatalog::instance();
    block.descriptors.resize(static_cast<Eigen::Index>(mols.size()),
                             static_cast<Eigen::Index>(catalog.size()));
    for (std::size_t i = 0; i < mols.size(); ++i) {
      const DescriptorVector v = compute_descriptors(mols[i]);
      for (std::size_t j = 0; j < v.values.size(); ++j)
        block.descriptors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            v.values[j];
    }
  } else {
    block.fps.reserve(mols.size());
    for (const Molecule& mol : mols)
      block.fps.push_back(
          fingerprint(mol, model.spec.features.scheme, model.spec.features.param));
  }
  return block;
}

}  // namespace autoqsar
