#pragma once

#include <string>

#include "autoqsar/model_io.hpp"
#include "autoqsar/pipeline.hpp"

namespace autoqsar {

// Report bundle for the top-ranked model:
//   predictions.csv   id, set (train/test), experimental, predicted
//   scatter.svg       predicted vs experimental, train/test marked, identity line
//   histogram.csv     activity distribution for train / test / full
//   summary.txt       run totals and the top-10 scorecards with wall times
void write_report(const RankedModels& rm, const Dataset& ds, const TrainedModel& top,
                  const std::string& out_dir);

// Convenience: loads manifest, dataset and top model from a run directory.
void write_report_from_run(const std::string& run_dir, const std::string& out_dir);

// Plain-text run summary (also used by the CLI inspect subcommand).
std::string run_summary_text(const RankedModels& rm);

}  // namespace autoqsar
