#include "autoqsar/model_io.hpp"

#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "autoqsar/errors.hpp"
#include "autoqsar/stable_hash.hpp"

namespace autoqsar {

namespace fs = std::filesystem;
using nlohmann::json;

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

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = r > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
  return m;
}

json fingerprint_to_json(const Fingerprint& fp) {
  json j;
  j["scheme"] = scheme_name(fp.scheme);
  j["param"] = fp.param;
  json keys = json::array();
  json counts = json::array();
  for (const auto& [k, c] : fp.features) {
    keys.push_back(k);
    counts.push_back(c);
  }
  j["keys"] = std::move(keys);
  j["counts"] = std::move(counts);
  return j;
}

Fingerprint fingerprint_from_json(const json& j) {
  Fingerprint fp;
  fp.scheme = scheme_from_name(j.at("scheme").get<std::string>());
  fp.param = j.at("param").get<int>();
  const auto& keys = j.at("keys");
  const auto& counts = j.at("counts");
  for (std::size_t i = 0; i < keys.size(); ++i)
    fp.features[keys[i].get<std::uint64_t>()] = counts[i].get<std::uint32_t>();
  return fp;
}

json spec_to_json(const ModelSpec& spec) {
  json j;
  j["method"] = method_name(spec.method);
  if (spec.features.descriptors) {
    j["features"] = "descriptors";
  } else {
    j["features"] = {{"scheme", scheme_name(spec.features.scheme)},
                     {"param", spec.features.param}};
  }
  j["kernel"] = kernel_name(spec.kernel);
  j["max_components"] = spec.max_components;
  j["tree_max_depth"] = spec.tree_max_depth;
  j["tree_min_leaf"] = spec.tree_min_leaf;
  j["laplace_alpha"] = spec.laplace_alpha;
  if (spec.classification_threshold)
    j["classification_threshold"] = *spec.classification_threshold;
  else
    j["classification_threshold"] = nullptr;
  return j;
}

ModelSpec spec_from_json(const json& j) {
  ModelSpec spec;
  spec.method = method_from_name(j.at("method").get<std::string>());
  if (j.at("features").is_string()) {
    spec.features = FeatureSource::descriptor_table();
  } else {
    spec.features = FeatureSource::fingerprints(
        scheme_from_name(j.at("features").at("scheme").get<std::string>()),
        j.at("features").at("param").get<int>());
  }
  const std::string kernel = j.at("kernel").get<std::string>();
  for (KernelKind k : {KernelKind::Tanimoto, KernelKind::Gaussian, KernelKind::Linear})
    if (kernel == kernel_name(k)) spec.kernel = k;
  spec.max_components = j.at("max_components").get<int>();
  spec.tree_max_depth = j.at("tree_max_depth").get<int>();
  spec.tree_min_leaf = j.at("tree_min_leaf").get<int>();
  spec.laplace_alpha = j.at("laplace_alpha").get<double>();
  if (!j.at("classification_threshold").is_null())
    spec.classification_threshold = j.at("classification_threshold").get<double>();
  return spec;
}

json card_to_json(const ScoreCard& card) {
  json j;
  j["model_id"] = card.model_id;
  j["interval"] = card.interval;
  j["replicate"] = card.replicate;
  j["roster_index"] = card.roster_index;
  j["train_fraction"] = card.train_fraction;
  j["split_seed"] = card.split_seed;
  j["method"] = card.method;
  j["feature_source"] = card.feature_source;
  j["r2_train"] = card.r2_train;
  j["q2_test"] = card.q2_test;
  j["score"] = card.score;
  j["components"] = card.components;
  j["classification"] = card.classification;
  if (card.failed) j["failure"] = card.failure;
  return j;
}

ScoreCard card_from_json(const json& j) {
  ScoreCard card;
  card.model_id = j.at("model_id").get<std::string>();
  card.interval = j.at("interval").get<int>();
  card.replicate = j.at("replicate").get<int>();
  card.roster_index = j.at("roster_index").get<int>();
  card.train_fraction = j.at("train_fraction").get<double>();
  card.split_seed = j.at("split_seed").get<std::uint64_t>();
  card.method = j.at("method").get<std::string>();
  card.feature_source = j.at("feature_source").get<std::string>();
  card.r2_train = j.at("r2_train").get<double>();
  card.q2_test = j.at("q2_test").get<double>();
  card.score = j.at("score").get<double>();
  card.components = j.at("components").get<int>();
  card.classification = j.at("classification").get<bool>();
  if (j.contains("failure")) {
    card.failed = true;
    card.failure = j.at("failure").get<std::string>();
  }
  return card;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << content;
}

json state_to_json(const TrainedModel& model) {
  json j;
  if (const auto* linear = std::get_if<LinearModelState>(&model.state)) {
    j["family"] = "linear";
    j["beta"] = vector_to_json(linear->beta);
    j["intercept"] = linear->intercept;
    j["selected"] = linear->selected;
  } else if (const auto* kpls = std::get_if<KplsModelState>(&model.state)) {
    j["family"] = "kpls";
    j["kernel"] = kernel_name(kpls->kernel);
    j["gamma"] = kpls->gamma;
    j["alpha"] = vector_to_json(kpls->alpha);
    j["train_col_mean"] = vector_to_json(kpls->train_col_mean);
    j["grand_mean"] = kpls->grand_mean;
    j["y_mean"] = kpls->y_mean;
    if (kpls->kernel == KernelKind::Tanimoto) {
      json refs = json::array();
      for (const Fingerprint& fp : kpls->ref_fps) refs.push_back(fingerprint_to_json(fp));
      j["ref_fps"] = std::move(refs);
    } else {
      j["ref_x"] = matrix_to_json(kpls->ref_x);
    }
  } else if (const auto* tree = std::get_if<TreeModelState>(&model.state)) {
    j["family"] = "tree";
    json nodes = json::array();
    for (const TreeNode& n : tree->nodes) {
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"value", n.value},
                       {"depth", n.depth},
                       {"count", n.count}});
    }
    j["nodes"] = std::move(nodes);
  } else {
    const auto& bayes = std::get<BayesModelState>(model.state);
    j["family"] = "bayes";
    j["threshold"] = bayes.threshold;
    j["on_descriptors"] = bayes.on_descriptors;
    j["median"] = vector_to_json(bayes.median);
    j["included"] = bayes.included;
    j["log_p1_active"] = vector_to_json(bayes.log_p1_active);
    j["log_p0_active"] = vector_to_json(bayes.log_p0_active);
    j["log_p1_inactive"] = vector_to_json(bayes.log_p1_inactive);
    j["log_p0_inactive"] = vector_to_json(bayes.log_p0_inactive);
    j["log_prior_active"] = bayes.log_prior_active;
    j["log_prior_inactive"] = bayes.log_prior_inactive;
    j["bits"] = bayes.bits;
  }
  return j;
}

void state_from_json(const json& j, TrainedModel& model) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "linear") {
    LinearModelState state;
    state.beta = vector_from_json(j.at("beta"));
    state.intercept = j.at("intercept").get<double>();
    state.selected = j.at("selected").get<std::vector<int>>();
    model.state = std::move(state);
  } else if (family == "kpls") {
    KplsModelState state;
    const std::string kernel = j.at("kernel").get<std::string>();
    for (KernelKind k : {KernelKind::Tanimoto, KernelKind::Gaussian, KernelKind::Linear})
      if (kernel == kernel_name(k)) state.kernel = k;
    state.gamma = j.at("gamma").get<double>();
    state.alpha = vector_from_json(j.at("alpha"));
    state.train_col_mean = vector_from_json(j.at("train_col_mean"));
    state.grand_mean = j.at("grand_mean").get<double>();
    state.y_mean = j.at("y_mean").get<double>();
    if (state.kernel == KernelKind::Tanimoto) {
      for (const json& fp : j.at("ref_fps")) state.ref_fps.push_back(fingerprint_from_json(fp));
    } else {
      state.ref_x = matrix_from_json(j.at("ref_x"));
    }
    model.state = std::move(state);
  } else if (family == "tree") {
    TreeModelState state;
    for (const json& nj : j.at("nodes")) {
      TreeNode n;
      n.feature = nj.at("feature").get<int>();
      n.threshold = nj.at("threshold").get<double>();
      n.left = nj.at("left").get<int>();
      n.right = nj.at("right").get<int>();
      n.value = nj.at("value").get<double>();
      n.depth = nj.at("depth").get<int>();
      n.count = nj.at("count").get<int>();
      state.nodes.push_back(n);
    }
    model.state = std::move(state);
  } else if (family == "bayes") {
    BayesModelState state;
    state.threshold = j.at("threshold").get<double>();
    state.on_descriptors = j.at("on_descriptors").get<bool>();
    state.median = vector_from_json(j.at("median"));
    state.included = j.at("included").get<std::vector<int>>();
    state.log_p1_active = vector_from_json(j.at("log_p1_active"));
    state.log_p0_active = vector_from_json(j.at("log_p0_active"));
    state.log_p1_inactive = vector_from_json(j.at("log_p1_inactive"));
    state.log_p0_inactive = vector_from_json(j.at("log_p0_inactive"));
    state.log_prior_active = j.at("log_prior_active").get<double>();
    state.log_prior_inactive = j.at("log_prior_inactive").get<double>();
    state.bits = j.at("bits").get<int>();
    model.state = std::move(state);
  } else {
    throw ArchiveError("unknown model family: " + family);
  }
}

// The probe: the model's own features for its first training row would need
// the dataset; instead the archive stores a ready-made feature row.
json probe_to_json(const TrainedModel& model, const FeatureBlock& probe,
                   double expected) {
  json j;
  if (model.spec.features.descriptors) {
    json row = json::array();
    for (Eigen::Index c = 0; c < probe.descriptors.cols(); ++c)
      row.push_back(probe.descriptors(0, c));
    j["descriptors"] = std::move(row);
  } else {
    j["fingerprint"] = fingerprint_to_json(probe.fps[0]);
  }
  j["expected"] = expected;
  return j;
}

FeatureBlock probe_block_from_json(const json& j) {
  FeatureBlock block;
  if (j.contains("descriptors")) {
    const auto& row = j.at("descriptors");
    block.descriptors.resize(1, static_cast<Eigen::Index>(row.size()));
    for (std::size_t c = 0; c < row.size(); ++c)
      block.descriptors(0, static_cast<Eigen::Index>(c)) = row[c].get<double>();
  } else {
    block.fps.push_back(fingerprint_from_json(j.at("fingerprint")));
  }
  return block;
}

json config_to_json(const PipelineConfig& config) {
  json j;
  j["frac_min"] = config.frac_min;
  j["frac_max"] = config.frac_max;
  j["step"] = config.step;
  j["models_per_interval"] = config.models_per_interval;
  j["max_pair_correlation"] = config.max_pair_correlation;
  j["master_seed"] = config.master_seed;
  if (config.classification_threshold)
    j["classification_threshold"] = *config.classification_threshold;
  else
    j["classification_threshold"] = nullptr;
  json roster = json::array();
  for (const ModelSpec& spec : config.roster) roster.push_back(spec_to_json(spec));
  j["roster"] = std::move(roster);
  return j;
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig config;
  config.frac_min = j.at("frac_min").get<double>();
  config.frac_max = j.at("frac_max").get<double>();
  config.step = j.at("step").get<double>();
  config.models_per_interval = j.at("models_per_interval").get<int>();
  config.max_pair_correlation = j.at("max_pair_correlation").get<double>();
  config.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (!j.at("classification_threshold").is_null())
    config.classification_threshold = j.at("classification_threshold").get<double>();
  for (const json& spec : j.at("roster")) config.roster.push_back(spec_from_json(spec));
  return config;
}

}  // namespace

std::string manifest_json(const RankedModels& rm) {
  json j;
  j["schema"] = kRunSchema;
  j["catalog_version"] = rm.catalog_version;
  j["dataset_digest"] = hex16(rm.dataset_digest);
  j["score_formula"] = "0.5*(r2+q2)-0.25*|r2-q2|";
  j["config"] = config_to_json(rm.config);
  j["counts"] = {{"intervals", rm.config.intervals()},
                 {"models_per_interval", rm.config.models_per_interval},
                 {"splits", rm.config.intervals() * rm.config.models_per_interval},
                 {"roster", rm.config.roster.size()},
                 {"units", rm.ranked.size() + rm.failed.size()},
                 {"successful", rm.ranked.size()},
                 {"failed", rm.failed.size()}};
  json ranked = json::array();
  for (const ScoreCard& card : rm.ranked) ranked.push_back(card_to_json(card));
  j["ranked"] = std::move(ranked);
  json failed = json::array();
  for (const ScoreCard& card : rm.failed) failed.push_back(card_to_json(card));
  j["failed"] = std::move(failed);
  return j.dump(2) + "\n";
}

void save_model(const TrainedModel& model, const ScoreCard& card,
                const std::string& path) {
  json j;
  j["schema_version"] = kModelSchemaVersion;
  j["spec"] = spec_to_json(model.spec);
  j["components"] = model.components;
  j["preprocessing"] = {{"retained", model.prep.retained},
                        {"mean", vector_to_json(model.prep.mean)},
                        {"scale", vector_to_json(model.prep.scale)}};
  j["state"] = state_to_json(model);
  j["training_ids"] = model.training_ids;
  j["scorecard"] = card_to_json(card);

  // Probe: a synthetic feature row derived from the model's own state keeps
  // the archive self-contained.
  FeatureBlock probe;
  if (model.spec.features.descriptors) {
    const auto& catalog_cols = model.prep.retained;
    Eigen::Index width = 0;
    for (int idx : catalog_cols) width = std::max<Eigen::Index>(width, idx + 1);
    probe.descriptors = Eigen::MatrixXd::Zero(1, width);
    for (std::size_t k = 0; k < catalog_cols.size(); ++k)
      probe.descriptors(0, catalog_cols[k]) =
          model.prep.mean(static_cast<Eigen::Index>(k)) +
          model.prep.scale(static_cast<Eigen::Index>(k));
  } else {
    const auto* kpls = std::get_if<KplsModelState>(&model.state);
    if (kpls && !kpls->ref_fps.empty()) {
      probe.fps.push_back(kpls->ref_fps.front());
    } else {
      Fingerprint fp;
      fp.scheme = model.spec.features.scheme;
      fp.param = model.spec.features.param;
      fp.features[12345] = 1;
      probe.fps.push_back(fp);
    }
  }
  const double expected = predict(model, probe)(0);
  j["probe"] = probe_to_json(model, probe, expected);

  write_text(path, j.dump(2) + "\n");
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArchiveError("cannot open model archive " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ArchiveError(std::string("corrupted model archive: ") + e.what());
  }
  try {
    if (!j.contains("schema_version") ||
        j.at("schema_version").get<int>() != kModelSchemaVersion)
      throw ArchiveError("model archive schema version mismatch (expected " +
                         std::to_string(kModelSchemaVersion) + ")");
    TrainedModel model;
    model.spec = spec_from_json(j.at("spec"));
    model.components = j.at("components").get<int>();
    model.prep.retained = j.at("preprocessing").at("retained").get<std::vector<int>>();
    model.prep.mean = vector_from_json(j.at("preprocessing").at("mean"));
    model.prep.scale = vector_from_json(j.at("preprocessing").at("scale"));
    state_from_json(j.at("state"), model);
    model.training_ids = j.at("training_ids").get<std::vector<std::string>>();

    const FeatureBlock probe = probe_block_from_json(j.at("probe"));
    const double expected = j.at("probe").at("expected").get<double>();
    const double actual = predict(model, probe)(0);
    if (std::memcmp(&expected, &actual, sizeof(double)) != 0)
      throw ArchiveError("probe prediction mismatch: archive corrupted or "
                         "produced by an incompatible build");
    return model;
  } catch (const json::exception& e) {
    throw ArchiveError(std::string("corrupted model archive: ") + e.what());
  }
}

void save_run(const RankedModels& rm, const Dataset& ds, const std::string& dir,
              int top_k) {
  if (top_k < 1) throw ConfigError("top_k must be >= 1");
  fs::create_directories(fs::path(dir) / "models");

  write_text((fs::path(dir) / "manifest.json").string(), manifest_json(rm));
  save_csv(ds, (fs::path(dir) / "dataset.csv").string());

  std::string csv =
      "rank,model_id,method,feature_source,interval,train_fraction,replicate,"
      "split_seed,r2_train,q2_test,score,components,classification,failed,"
      "failure,wall_seconds\n";
  int rank = 0;
  auto add_row = [&](const ScoreCard& c, int rank_number) {
    csv += (rank_number > 0 ? std::to_string(rank_number) : "") + "," + c.model_id + "," +
           c.method + "," + c.feature_source + "," + std::to_string(c.interval) + "," +
           format_double(c.train_fraction) + "," + std::to_string(c.replicate) + "," +
           std::to_string(c.split_seed) + "," + format_double(c.r2_train) + "," +
           format_double(c.q2_test) + "," + format_double(c.score) + "," +
           std::to_string(c.components) + "," + (c.classification ? "1" : "0") + "," +
           (c.failed ? "1" : "0") + ",\"" + c.failure + "\"," +
           format_double(c.wall_seconds) + "\n";
  };
  for (const ScoreCard& c : rm.ranked) add_row(c, ++rank);
  for (const ScoreCard& c : rm.failed) add_row(c, 0);
  write_text((fs::path(dir) / "scorecards.csv").string(), csv);

  if (rm.ranked.empty())
    throw NoModelsError("no successful models to persist");

  const int n_save = std::min<int>(top_k, static_cast<int>(rm.ranked.size()));
  std::string top_path;
  for (int k = 0; k < n_save; ++k) {
    const ScoreCard& card = rm.ranked[static_cast<std::size_t>(k)];
    TrainedModel model = refit_card(rm, ds, card);
    char name[64];
    std::snprintf(name, sizeof(name), "rank_%04d_%s.model", k + 1,
                  card.model_id.c_str());
    const std::string path = (fs::path(dir) / "models" / name).string();
    save_model(model, card, path);
    if (k == 0) top_path = path;
  }
  fs::copy_file(top_path, fs::path(dir) / "top.model",
                fs::copy_options::overwrite_existing);
}

std::pair<RankedModels, Dataset> load_run(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "manifest.json");
  if (!in) throw DataError("cannot open run manifest in " + dir);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ArchiveError(std::string("corrupted run manifest: ") + e.what());
  }
  if (!j.contains("schema") || j.at("schema").get<std::string>() != kRunSchema)
    throw ArchiveError("run manifest schema mismatch (expected " +
                       std::string(kRunSchema) + ")");

  RankedModels rm;
  rm.config = config_from_json(j.at("config"));
  rm.catalog_version = j.at("catalog_version").get<std::string>();
  rm.dataset_digest = std::stoull(j.at("dataset_digest").get<std::string>(), nullptr, 16);
  for (const json& card : j.at("ranked")) rm.ranked.push_back(card_from_json(card));
  for (const json& card : j.at("failed")) rm.failed.push_back(card_from_json(card));

  Dataset ds = load_csv((fs::path(dir) / "dataset.csv").string());
  if (dataset_digest(ds) != rm.dataset_digest)
    ds.warnings.push_back("dataset digest differs from the manifest record");
  return {std::move(rm), std::move(ds)};
}

}  // namespace autoqsar
