#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "autoqsar/molgraph.hpp"

namespace autoqsar {

enum class ActivityTransform { None, Ic50NanoMolar, Ic50MicroMolar };

ActivityTransform activity_transform_from_name(const std::string& name);
const char* activity_transform_name(ActivityTransform t);

struct DataRecord {
  std::string id;
  std::string smiles;
  double activity = 0.0;           // pIC50 after any transform
  std::size_t source_row = 0;      // 1-based row in the source file
};

// Curated learning set. Records keep file order (of each structure's first
// occurrence); duplicates are already merged and every SMILES parses.
struct Dataset {
  std::vector<DataRecord> records;
  std::string source_path;
  std::vector<std::string> warnings;  // fragment drops, duplicate merges

  std::size_t size() const { return records.size(); }
  int index_of(const std::string& id) const;  // -1 if absent
};

// Content digest over (id, smiles, activity) triples, independent of the
// source path. Stamped into run manifests.
std::uint64_t dataset_digest(const Dataset& ds);

// Applies the transform, parses every structure, merges exact duplicates
// (identical parsed graphs) whose activities differ by <= 0.2 pIC50 to their
// mean, and errors on larger disagreement or repeated ids.
Dataset curate(std::vector<DataRecord> rows, ActivityTransform transform,
               const std::string& source_path = {});

// CSV with header id,smiles,activity (order- and case-insensitive; extra
// columns ignored). Throws DataError with row numbers on any problem.
Dataset load_csv(const std::string& path,
                 ActivityTransform transform = ActivityTransform::None);

// Prediction input: header id,smiles (activity optional and ignored).
// No duplicate merging; every SMILES must parse.
std::vector<DataRecord> load_structures_csv(const std::string& path);

void save_csv(const Dataset& ds, const std::string& path);

// One randomized stratified split. Id vectors are lexicographically sorted.
struct SplitSpec {
  double train_fraction = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

// Activity-sorted block sampling: records sorted by activity, partitioned
// into blocks of round(1/(1-train_fraction)); one uniformly chosen member
// per block joins the test set until it holds n - round(train_fraction*n)
// records, with seeded global top-up for any shortfall. Deterministic in
// (dataset content, train_fraction, seed).
SplitSpec stratified_split(const Dataset& ds, double train_fraction,
                           std::uint64_t seed);

// Inclusive fraction grid; replicate j at interval i uses the derived seed
// hash(master_seed, i, j), so widening the grid never reshuffles existing
// splits. Ordered by (interval, replicate).
std::vector<SplitSpec> split_grid(const Dataset& ds, double frac_min,
                                  double frac_max, double step,
                                  int models_per_interval,
                                  std::uint64_t master_seed);

// Number of grid intervals (shared by split_grid and run manifests).
int grid_interval_count(double frac_min, double frac_max, double step);

}  // namespace autoqsar
