#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "autoqsar/errors.hpp"
#include "autoqsar/model_io.hpp"
#include "autoqsar/pipeline.hpp"
#include "autoqsar/report.hpp"
#include "support/molgen.hpp"

using namespace autoqsar;
namespace fs = std::filesystem;

namespace {

PipelineConfig small_config(std::vector<ModelSpec> roster, int per_interval = 3) {
  PipelineConfig config;
  config.frac_min = 0.75;
  config.frac_max = 0.75;
  config.step = 0.01;
  config.models_per_interval = per_interval;
  config.roster = std::move(roster);
  config.master_seed = 99;
  return config;
}

ModelSpec spec_of(Method m) {
  ModelSpec spec;
  spec.method = m;
  return spec;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& tag) {
  auto dir = fs::temp_directory_path() / ("aq_run_" + tag);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("score formula examples") {
  CHECK(score(1.0, 1.0) == 1.0);
  CHECK(score(0.9, 0.8) == doctest::Approx(0.825).epsilon(1e-12));
  for (double v : {-0.5, 0.0, 0.3, 0.97})
    CHECK(score(v, v) == doctest::Approx(v).epsilon(1e-12));
}

TEST_CASE("score monotonicity") {
  // Fixed gap: score strictly increases with the sum.
  CHECK(score(0.8, 0.6) < score(0.9, 0.7));
  CHECK(score(0.5, 0.7) < score(0.6, 0.8));
  // Fixed sum: score strictly decreases with the gap.
  CHECK(score(0.75, 0.75) > score(0.8, 0.7));
  CHECK(score(0.8, 0.7) > score(0.9, 0.6));
}

TEST_CASE("ranking order and tiebreaks") {
  ScoreCard a, b, c, d;
  a.model_id = "aaa";
  a.score = 0.9;
  a.q2_test = 0.85;
  b.model_id = "bbb";
  b.score = 0.8;
  b.q2_test = 0.99;
  c.model_id = "ccc";
  c.score = 0.9;
  c.q2_test = 0.80;
  d.model_id = "aab";
  d.score = 0.9;
  d.q2_test = 0.85;

  std::vector<ScoreCard> cards{b, c, a, d};
  sort_ranked(cards);
  CHECK(cards[0].model_id == "aaa");  // tie on (score, q2): id decides
  CHECK(cards[1].model_id == "aab");
  CHECK(cards[2].model_id == "ccc");  // same score, lower q2
  CHECK(cards[3].model_id == "bbb");  // lower score despite best q2
}

TEST_CASE("ranking is invariant under strictly increasing score transforms") {
  StableRng rng(8);
  std::vector<ScoreCard> cards(20);
  for (int i = 0; i < 20; ++i) {
    cards[static_cast<std::size_t>(i)].model_id = "m" + std::to_string(i);
    cards[static_cast<std::size_t>(i)].score = rng.uniform01();
    cards[static_cast<std::size_t>(i)].q2_test = rng.uniform01();
  }
  auto transformed = cards;
  for (auto& c : transformed) c.score = 3.0 * c.score + 1.0;
  sort_ranked(cards);
  sort_ranked(transformed);
  for (std::size_t i = 0; i < cards.size(); ++i)
    CHECK(cards[i].model_id == transformed[i].model_id);
}

TEST_CASE("roster expansion") {
  auto roster = expand_roster({"pls", "mlr", "pcr", "rp"}, {"radial"}, std::nullopt);
  CHECK(roster.size() == 4);
  for (const auto& spec : roster) CHECK(spec.features.descriptors);

  auto with_kpls = expand_roster({"kpls", "pls"},
                                 {"radial", "linear", "dendritic", "molprint2d"},
                                 std::nullopt);
  CHECK(with_kpls.size() == 6);  // kpls: descriptors + 4 schemes; pls: 1
  CHECK(with_kpls[0].method == Method::KPLS);
  CHECK(with_kpls[0].features.descriptors);
  CHECK(with_kpls[0].kernel == KernelKind::Gaussian);
  CHECK(with_kpls[1].kernel == KernelKind::Tanimoto);

  CHECK_THROWS_AS(expand_roster({"bayes"}, {"radial"}, std::nullopt), ConfigError);
  auto bayes = expand_roster({"bayes"}, {"radial"}, 6.0);
  CHECK(bayes.size() == 2);
  CHECK_THROWS_AS(expand_roster({"qsvm"}, {}, std::nullopt), ConfigError);
}

TEST_CASE("run_pipeline: counts, ranking and scorecard integrity") {
  Dataset ds = testing::synthetic_linear_dataset(1, 40, 0.1);
  PipelineConfig config = small_config(
      {spec_of(Method::PLS), spec_of(Method::RP)}, 4);
  RankedModels rm = run_pipeline(config, ds);

  CHECK(rm.ranked.size() + rm.failed.size() == 4 * 2);
  CHECK(rm.failed.empty());
  CHECK(rm.dataset_digest == dataset_digest(ds));

  double last_score = 1e9;
  std::set<std::string> ids;
  for (const ScoreCard& card : rm.ranked) {
    CHECK(card.score <= last_score);
    last_score = card.score;
    CHECK(card.score ==
          doctest::Approx(score(card.r2_train, card.q2_test)).epsilon(1e-12));
    CHECK(ids.insert(card.model_id).second);  // unique model ids
    CHECK(card.wall_seconds >= 0.0);
  }
  // The planted signal is linear in descriptors: PLS should dominate.
  CHECK(rm.ranked.front().method == "pls");
  CHECK(rm.ranked.front().q2_test > 0.8);
}

TEST_CASE("run_pipeline is deterministic and thread-count independent") {
  Dataset ds = testing::synthetic_linear_dataset(2, 30, 0.15);
  ModelSpec kpls;
  kpls.method = Method::KPLS;
  kpls.features = FeatureSource::fingerprints(FingerprintScheme::Radial, 3);
  PipelineConfig config = small_config({spec_of(Method::PLS), kpls}, 3);

  RankedModels serial = run_pipeline(config, ds);
  config.thread_count = 4;
  RankedModels parallel = run_pipeline(config, ds);

  // thread_count is not part of the manifest; byte-identical output.
  CHECK(manifest_json(serial) == manifest_json(parallel));
}

TEST_CASE("failed fits become failed scorecards, never abort the run") {
  Dataset ds = testing::synthetic_linear_dataset(3, 24, 0.1);
  // Threshold below every activity: bayes sees a single class on any split.
  double lo = 1e9;
  for (const auto& r : ds.records) lo = std::min(lo, r.activity);
  ModelSpec bayes;
  bayes.method = Method::BAYES;
  bayes.features = FeatureSource::fingerprints(FingerprintScheme::Radial, 2);
  bayes.classification_threshold = lo - 1.0;
  PipelineConfig config = small_config({bayes, spec_of(Method::PLS)}, 2);
  config.classification_threshold = bayes.classification_threshold;

  RankedModels rm = run_pipeline(config, ds);
  CHECK(rm.ranked.size() == 2);   // the PLS units
  CHECK(rm.failed.size() == 2);   // the bayes units
  for (const ScoreCard& card : rm.failed) {
    CHECK(card.failed);
    CHECK(!card.failure.empty());
    CHECK(card.method == "bayes");
  }

  auto dir = temp_dir("nomodels");
  PipelineConfig only_bayes = small_config({bayes}, 2);
  RankedModels none = run_pipeline(only_bayes, ds);
  CHECK(none.ranked.empty());
  CHECK_THROWS_AS(save_run(none, ds, dir.string(), 1), NoModelsError);
  fs::remove_all(dir);
}

TEST_CASE("no-leakage audit: test-row activity mutation leaves preprocessing intact") {
  Dataset ds = testing::synthetic_linear_dataset(4, 30, 0.1);
  PipelineConfig config = small_config({spec_of(Method::PLS)});
  const SplitSpec split = stratified_split(ds, 0.75, 4242);

  ModelSpec kpls_fp;
  kpls_fp.method = Method::KPLS;
  kpls_fp.features = FeatureSource::fingerprints(FingerprintScheme::Radial, 3);

  for (const ModelSpec& spec :
       {spec_of(Method::PLS), spec_of(Method::PCR), spec_of(Method::RP), kpls_fp}) {
    const FeatureCache cache = build_feature_cache(ds, {spec});
    UnitResult base = evaluate_unit(ds, cache, split, 0, 0, spec, 0, config, false);
    REQUIRE(!base.card.failed);

    // Mutate one held-out row's activity; the frozen split keeps it held out.
    Dataset mutated = ds;
    const int row = mutated.index_of(split.test_ids.front());
    REQUIRE(row >= 0);
    mutated.records[static_cast<std::size_t>(row)].activity += 3.7;
    const FeatureCache mcache = build_feature_cache(mutated, {spec});
    UnitResult after = evaluate_unit(mutated, mcache, split, 0, 0, spec, 0, config, false);

    CHECK(after.card.preprocess_digest == base.card.preprocess_digest);
    CHECK(after.card.r2_train == base.card.r2_train);  // train side untouched
    CHECK(after.card.q2_test != base.card.q2_test);    // test metric must move

    // Mutating a training row must reach the fitted model.
    Dataset train_mutated = ds;
    const int trow = train_mutated.index_of(split.train_ids.front());
    train_mutated.records[static_cast<std::size_t>(trow)].activity += 3.7;
    const FeatureCache tcache = build_feature_cache(train_mutated, {spec});
    UnitResult tafter =
        evaluate_unit(train_mutated, tcache, split, 0, 0, spec, 0, config, false);
    CHECK(tafter.card.r2_train != base.card.r2_train);
  }
}

TEST_CASE("save_run and load_model round trip") {
  Dataset ds = testing::synthetic_linear_dataset(5, 30, 0.1);
  ModelSpec kpls;
  kpls.method = Method::KPLS;
  kpls.features = FeatureSource::fingerprints(FingerprintScheme::Radial, 3);
  PipelineConfig config = small_config({spec_of(Method::PLS), kpls}, 2);
  RankedModels rm = run_pipeline(config, ds);
  REQUIRE(!rm.ranked.empty());

  auto dir = temp_dir("roundtrip");
  save_run(rm, ds, dir.string(), 3);

  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "scorecards.csv"));
  CHECK(fs::exists(dir / "dataset.csv"));
  CHECK(fs::exists(dir / "top.model"));

  // Manifest bytes match the in-memory serialization and record the config.
  const std::string manifest = slurp(dir / "manifest.json");
  CHECK(manifest == manifest_json(rm));
  CHECK(manifest.find("\"max_pair_correlation\": 0.99") != std::string::npos);

  // Reload the top model; predictions must match the refit bit for bit.
  TrainedModel original = refit_card(rm, ds, rm.ranked.front());
  TrainedModel loaded = load_model((dir / "top.model").string());

  std::vector<Molecule> mols;
  for (const auto& r : ds.records) mols.push_back(parse_smiles(r.smiles));
  const FeatureBlock block = features_for(original, mols);
  const Eigen::VectorXd a = predict(original, block);
  const Eigen::VectorXd b = predict(loaded, block);
  REQUIRE(a.size() == b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) CHECK(a(i) == b(i));

  // load_run restores the manifest contents.
  auto [rm2, ds2] = load_run(dir.string());
  CHECK(rm2.ranked.size() == rm.ranked.size());
  CHECK(rm2.dataset_digest == rm.dataset_digest);
  CHECK(dataset_digest(ds2) == dataset_digest(ds));
  CHECK(manifest_json(rm2) == manifest);

  fs::remove_all(dir);
}

TEST_CASE("model archive schema and corruption errors") {
  Dataset ds = testing::synthetic_linear_dataset(6, 24, 0.1);
  PipelineConfig config = small_config({spec_of(Method::PLS)}, 1);
  RankedModels rm = run_pipeline(config, ds);
  auto dir = temp_dir("schema");
  save_run(rm, ds, dir.string(), 1);

  // Wrong schema version.
  std::string text = slurp(dir / "top.model");
  std::string tampered = text;
  auto pos = tampered.find("\"schema_version\": 1");
  REQUIRE(pos != std::string::npos);
  tampered.replace(pos, std::string("\"schema_version\": 1").size(),
                   "\"schema_version\": 99");
  std::ofstream(dir / "bad_schema.model") << tampered;
  CHECK_THROWS_AS(load_model((dir / "bad_schema.model").string()), ArchiveError);

  // Corrupted state: flip a stored coefficient, probe check must trip.
  std::string broken = text;
  pos = broken.find("\"intercept\":");
  REQUIRE(pos != std::string::npos);
  broken.replace(pos, std::string("\"intercept\":").size(), "\"intercept\": 1e9, \"x\":");
  std::ofstream(dir / "broken.model") << broken;
  CHECK_THROWS_AS(load_model((dir / "broken.model").string()), ArchiveError);

  // Not JSON at all.
  std::ofstream(dir / "garbage.model") << "not a model";
  CHECK_THROWS_AS(load_model((dir / "garbage.model").string()), ArchiveError);

  CHECK_THROWS_AS(load_model((dir / "missing.model").string()), ArchiveError);
  fs::remove_all(dir);
}

TEST_CASE("report bundle shape") {
  Dataset ds = testing::synthetic_linear_dataset(7, 36, 0.1);
  PipelineConfig config = small_config({spec_of(Method::PLS)}, 2);
  RankedModels rm = run_pipeline(config, ds);
  auto run_dir = temp_dir("report_run");
  save_run(rm, ds, run_dir.string(), 1);

  auto out_dir = temp_dir("report_out");
  write_report_from_run(run_dir.string(), out_dir.string());

  const std::string csv = slurp(out_dir / "predictions.csv");
  std::size_t rows = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
  CHECK(rows == ds.size() + 1);  // header + one row per record

  // Train/test labels follow the winning split exactly.
  const ScoreCard& best = rm.ranked.front();
  SplitSpec split = stratified_split(ds, best.train_fraction, best.split_seed);
  std::set<std::string> test_ids(split.test_ids.begin(), split.test_ids.end());
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // header
  std::size_t checked = 0;
  while (std::getline(lines, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const std::string id = line.substr(0, c1);
    const std::string set = line.substr(c1 + 1, c2 - c1 - 1);
    CHECK(set == (test_ids.count(id) ? "test" : "train"));
    ++checked;
  }
  CHECK(checked == ds.size());

  // One SVG circle per record.
  const std::string svg = slurp(out_dir / "scatter.svg");
  std::size_t circles = 0;
  for (std::size_t at = svg.find("<circle"); at != std::string::npos;
       at = svg.find("<circle", at + 1))
    ++circles;
  CHECK(circles == ds.size());
  CHECK(svg.find("stroke-dasharray") != std::string::npos);  // identity line

  const std::string hist = slurp(out_dir / "histogram.csv");
  CHECK(hist.find("bin_low,bin_high,train,test,full") == 0);

  const std::string summary = slurp(out_dir / "summary.txt");
  CHECK(summary.find("top models") != std::string::npos);
  CHECK(summary.find("wall") != std::string::npos);

  fs::remove_all(run_dir);
  fs::remove_all(out_dir);
}

TEST_CASE("pipeline config validation") {
  PipelineConfig config;
  CHECK_THROWS_AS(config.validate(), ConfigError);  // empty roster
  config.roster = {spec_of(Method::PLS)};
  config.frac_min = 0.4;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config.frac_min = 0.70;
  config.step = -1;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config.step = 0.01;
  config.validate();

  Dataset tiny = testing::synthetic_linear_dataset(8, 11, 0.1);
  CHECK_THROWS_AS(run_pipeline(config, tiny), DataError);
}

TEST_CASE("default config reproduces the protocol shape") {
  PipelineConfig config;
  config.roster = {spec_of(Method::PLS)};
  CHECK(config.intervals() == 11);
  CHECK(config.models_per_interval == 99);
  CHECK(config.max_pair_correlation == 0.99);
  CHECK(config.frac_min == 0.70);
  CHECK(config.frac_max == 0.80);
}
