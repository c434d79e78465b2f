#pragma once

#include <string>
#include <utility>

#include "autoqsar/pipeline.hpp"

namespace autoqsar {

// Run directory layout written by save_run:
//   manifest.json     deterministic ranked manifest (no wall times)
//   scorecards.csv    every card including wall times
//   dataset.csv       curated learning set (report input)
//   models/rank_NNNN_<id>.model
//   top.model         copy of the best model
//
// Model archives are self-describing versioned JSON. Every archive stores a
// probe input and its prediction; load_model replays the probe and fails on
// any bit difference.

inline constexpr const char* kRunSchema = "aq-run-1";
inline constexpr int kModelSchemaVersion = 1;

void save_run(const RankedModels& rm, const Dataset& ds, const std::string& dir,
              int top_k);

void save_model(const TrainedModel& model, const ScoreCard& card,
                const std::string& path);

TrainedModel load_model(const std::string& path);  // throws ArchiveError

// Reloads manifest + dataset from a run directory (models stay on disk).
std::pair<RankedModels, Dataset> load_run(const std::string& dir);

std::string manifest_json(const RankedModels& rm);  // exact manifest bytes

}  // namespace autoqsar
