#include "autoqsar/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "autoqsar/errors.hpp"

namespace autoqsar {

namespace fs = std::filesystem;

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string fixed(double v, int prec = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(prec);
  os << v;
  return os.str();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << content;
}

struct Point {
  std::string id;
  bool test = false;
  double experimental = 0.0;
  double predicted = 0.0;
};

std::string scatter_svg(const std::vector<Point>& points) {
  const int width = 640, height = 640, margin = 60;
  double lo = points.front().experimental, hi = lo;
  for (const Point& p : points) {
    lo = std::min({lo, p.experimental, p.predicted});
    hi = std::max({hi, p.experimental, p.predicted});
  }
  const double pad = (hi - lo) * 0.05 + 1e-9;
  lo -= pad;
  hi += pad;
  const double span = hi - lo;
  auto sx = [&](double v) { return margin + (v - lo) / span * (width - 2 * margin); };
  auto sy = [&](double v) {
    return height - margin - (v - lo) / span * (height - 2 * margin);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
      << "\">\n";
  svg << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  // axes
  svg << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
      << width - margin << "\" y2=\"" << height - margin
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin
      << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
  // identity line
  svg << "<line x1=\"" << sx(lo + pad) << "\" y1=\"" << sy(lo + pad) << "\" x2=\""
      << sx(hi - pad) << "\" y2=\"" << sy(hi - pad)
      << "\" stroke=\"#888\" stroke-dasharray=\"6,4\"/>\n";
  // tick labels
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + pad + (hi - lo - 2 * pad) * t / 4.0;
    svg << "<text x=\"" << sx(v) << "\" y=\"" << height - margin + 20
        << "\" font-size=\"12\" text-anchor=\"middle\">" << fixed(v, 1)
        << "</text>\n";
    svg << "<text x=\"" << margin - 10 << "\" y=\"" << sy(v) + 4
        << "\" font-size=\"12\" text-anchor=\"end\">" << fixed(v, 1) << "</text>\n";
  }
  svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 15
      << "\" font-size=\"14\" text-anchor=\"middle\">experimental pIC50</text>\n";
  svg << "<text x=\"18\" y=\"" << height / 2
      << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << height / 2 << ")\">predicted pIC50</text>\n";
  // legend (rect swatches so every circle in the file is a data point)
  svg << "<rect x=\"" << width - margin - 115 << "\" y=\"" << margin - 5
      << "\" width=\"10\" height=\"10\" fill=\"#1f77b4\"/>"
      << "<text x=\"" << width - margin - 98 << "\" y=\"" << margin + 4
      << "\" font-size=\"12\">train</text>\n";
  svg << "<rect x=\"" << width - margin - 55 << "\" y=\"" << margin - 5
      << "\" width=\"10\" height=\"10\" fill=\"#d62728\"/>"
      << "<text x=\"" << width - margin - 38 << "\" y=\"" << margin + 4
      << "\" font-size=\"12\">test</text>\n";
  // one circle per record
  for (const Point& p : points) {
    svg << "<circle cx=\"" << fixed(sx(p.experimental), 2) << "\" cy=\""
        << fixed(sy(p.predicted), 2) << "\" r=\"4\" fill=\""
        << (p.test ? "#d62728" : "#1f77b4") << "\" fill-opacity=\"0.75\"><title>"
        << p.id << "</title></circle>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string histogram_csv(const std::vector<Point>& points) {
  double lo = points.front().experimental, hi = lo;
  for (const Point& p : points) {
    lo = std::min(lo, p.experimental);
    hi = std::max(hi, p.experimental);
  }
  const int bins = 10;
  const double width = (hi - lo) / bins + 1e-12;
  std::vector<int> train(bins, 0), test(bins, 0), full(bins, 0);
  for (const Point& p : points) {
    int b = static_cast<int>((p.experimental - lo) / width);
    b = std::clamp(b, 0, bins - 1);
    ++full[static_cast<std::size_t>(b)];
    if (p.test)
      ++test[static_cast<std::size_t>(b)];
    else
      ++train[static_cast<std::size_t>(b)];
  }
  std::string csv = "bin_low,bin_high,train,test,full\n";
  for (int b = 0; b < bins; ++b) {
    csv += format_double(lo + b * width) + "," + format_double(lo + (b + 1) * width) +
           "," + std::to_string(train[static_cast<std::size_t>(b)]) + "," +
           std::to_string(test[static_cast<std::size_t>(b)]) + "," +
           std::to_string(full[static_cast<std::size_t>(b)]) + "\n";
  }
  return csv;
}

}  // namespace

std::string run_summary_text(const RankedModels& rm) {
  std::ostringstream os;
  os << "run summary\n";
  os << "  catalog version: " << rm.catalog_version << "\n";
  os << "  grid: " << fixed(rm.config.frac_min, 2) << ".." << fixed(rm.config.frac_max, 2)
     << " step " << fixed(rm.config.step, 2) << " (" << rm.config.intervals()
     << " intervals x " << rm.config.models_per_interval << " splits)\n";
  os << "  roster size: " << rm.config.roster.size() << "\n";
  os << "  max pair correlation: " << format_double(rm.config.max_pair_correlation)
     << "\n";
  os << "  master seed: " << rm.config.master_seed << "\n";
  os << "  models: " << rm.ranked.size() + rm.failed.size() << " total, "
     << rm.ranked.size() << " successful, " << rm.failed.size() << " failed\n";
  if (rm.total_wall_seconds > 0)
    os << "  total wall time: " << fixed(rm.total_wall_seconds, 1) << " s\n";
  os << "\n  top models (score | q2 | r2 | N | method | features | fraction | wall s)\n";
  const std::size_t top = std::min<std::size_t>(10, rm.ranked.size());
  for (std::size_t i = 0; i < top; ++i) {
    const ScoreCard& c = rm.ranked[i];
    os << "  " << i + 1 << ". " << fixed(c.score) << " | " << fixed(c.q2_test) << " | "
       << fixed(c.r2_train) << " | " << c.components << " | " << c.method << " | "
       << c.feature_source << " | " << fixed(c.train_fraction, 2) << " | "
       << fixed(c.wall_seconds, 3) << "  (" << c.model_id << ")\n";
  }
  return os.str();
}

void write_report(const RankedModels& rm, const Dataset& ds, const TrainedModel& top,
                  const std::string& out_dir) {
  if (rm.ranked.empty()) throw NoModelsError("report needs at least one successful model");
  fs::create_directories(out_dir);
  const ScoreCard& best = rm.ranked.front();

  const SplitSpec split = stratified_split(ds, best.train_fraction, best.split_seed);
  std::set<std::string> test_ids(split.test_ids.begin(), split.test_ids.end());

  std::vector<Molecule> mols;
  mols.reserve(ds.size());
  for (const DataRecord& r : ds.records) mols.push_back(parse_smiles(r.smiles));
  const FeatureBlock features = features_for(top, mols);
  const Eigen::VectorXd predicted = predict(top, features);

  std::vector<Point> points;
  points.reserve(ds.size());
  std::string csv = "id,set,experimental,predicted\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    Point p;
    p.id = ds.records[i].id;
    p.test = test_ids.count(p.id) > 0;
    p.experimental = ds.records[i].activity;
    p.predicted = predicted(static_cast<Eigen::Index>(i));
    csv += p.id + "," + (p.test ? "test" : "train") + "," +
           format_double(p.experimental) + "," + format_double(p.predicted) + "\n";
    points.push_back(std::move(p));
  }

  write_text((fs::path(out_dir) / "predictions.csv").string(), csv);
  write_text((fs::path(out_dir) / "scatter.svg").string(), scatter_svg(points));
  write_text((fs::path(out_dir) / "histogram.csv").string(), histogram_csv(points));
  write_text((fs::path(out_dir) / "summary.txt").string(), run_summary_text(rm));
}

void write_report_from_run(const std::string& run_dir, const std::string& out_dir) {
  auto [rm, ds] = load_run(run_dir);
  const TrainedModel top = load_model((fs::path(run_dir) / "top.model").string());
  write_report(rm, ds, top, out_dir);
}

}  // namespace autoqsar
