#include "autoqsar/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "autoqsar/errors.hpp"
#include "autoqsar/stable_hash.hpp"

namespace autoqsar {

namespace {

constexpr double kDuplicateMergeWindow = 0.2;  // pIC50 units

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

double parse_activity(const std::string& text, std::size_t row) {
  const std::string t = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size())
    throw DataError("row " + std::to_string(row) + ": non-numeric activity '" + text + "'");
  if (!std::isfinite(value))
    throw DataError("row " + std::to_string(row) + ": activity is not finite");
  return value;
}

double apply_transform(double value, ActivityTransform t, std::size_t row) {
  switch (t) {
    case ActivityTransform::None:
      return value;
    case ActivityTransform::Ic50NanoMolar:
    case ActivityTransform::Ic50MicroMolar: {
      if (value <= 0.0)
        throw DataError("row " + std::to_string(row) +
                        ": IC50 must be positive for pIC50 conversion");
      const double offset = t == ActivityTransform::Ic50NanoMolar ? 9.0 : 6.0;
      return offset - std::log10(value);
    }
  }
  return value;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

ActivityTransform activity_transform_from_name(const std::string& name) {
  const std::string n = to_lower(trim(name));
  if (n == "none" || n.empty()) return ActivityTransform::None;
  if (n == "ic50-nm") return ActivityTransform::Ic50NanoMolar;
  if (n == "ic50-um") return ActivityTransform::Ic50MicroMolar;
  throw ConfigError("unknown activity transform: " + name);
}

const char* activity_transform_name(ActivityTransform t) {
  switch (t) {
    case ActivityTransform::None: return "none";
    case ActivityTransform::Ic50NanoMolar: return "ic50-nm";
    case ActivityTransform::Ic50MicroMolar: return "ic50-um";
  }
  return "none";
}

int Dataset::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < records.size(); ++i)
    if (records[i].id == id) return static_cast<int>(i);
  return -1;
}

std::uint64_t dataset_digest(const Dataset& ds) {
  std::uint64_t h = mix64(0x6461746173657464ULL);
  for (const DataRecord& r : ds.records) {
    h = hash_combine(h, hash_bytes(r.id));
    h = hash_combine(h, hash_bytes(r.smiles));
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(r.activity));
    std::memcpy(&bits, &r.activity, sizeof(bits));
    h = hash_combine(h, bits);
  }
  return h;
}

Dataset curate(std::vector<DataRecord> rows, ActivityTransform transform,
               const std::string& source_path) {
  Dataset ds;
  ds.source_path = source_path;

  struct Group {
    std::vector<std::size_t> members;  // indices into rows
  };
  std::map<std::uint64_t, Group> by_structure;
  std::map<std::string, std::size_t> id_seen;  // id -> first row number
  std::vector<std::uint64_t> order;            // structure keys in first-seen order

  for (std::size_t i = 0; i < rows.size(); ++i) {
    DataRecord& r = rows[i];
    r.activity = apply_transform(r.activity, transform, r.source_row);
    if (r.id.empty())
      throw DataError("row " + std::to_string(r.source_row) + ": empty id");

    Molecule mol;
    try {
      mol = parse_smiles(r.smiles);
    } catch (const SmilesError& e) {
      throw DataError("row " + std::to_string(r.source_row) + ": " + e.what());
    }
    if (r.smiles.find('.') != std::string::npos) {
      ds.warnings.push_back("row " + std::to_string(r.source_row) +
                            ": multi-fragment input, kept largest fragment");
    }

    const std::uint64_t key = structure_key(mol);
    auto [it, inserted] = by_structure.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.members.push_back(i);
  }

  for (std::uint64_t key : order) {
    const Group& g = by_structure.at(key);
    const DataRecord& first = rows[g.members.front()];
    double lo = first.activity, hi = first.activity, sum = 0.0;
    for (std::size_t idx : g.members) {
      lo = std::min(lo, rows[idx].activity);
      hi = std::max(hi, rows[idx].activity);
      sum += rows[idx].activity;
    }
    if (g.members.size() > 1) {
      if (hi - lo > kDuplicateMergeWindow) {
        std::ostringstream os;
        os << "duplicate structures with conflicting activities (spread "
           << format_double(hi - lo) << " pIC50): rows";
        for (std::size_t idx : g.members)
          os << " " << rows[idx].source_row << " (id " << rows[idx].id << ")";
        throw DataError(os.str());
      }
      std::ostringstream os;
      os << "merged " << g.members.size() << " duplicate rows of id " << first.id
         << " to mean activity";
      ds.warnings.push_back(os.str());
    }
    DataRecord merged = first;
    merged.activity = sum / static_cast<double>(g.members.size());

    auto [id_it, id_new] = id_seen.try_emplace(merged.id, merged.source_row);
    if (!id_new)
      throw DataError("duplicate id '" + merged.id + "' on rows " +
                      std::to_string(id_it->second) + " and " +
                      std::to_string(merged.source_row) +
                      " with different structures");
    ds.records.push_back(std::move(merged));
  }

  // Ids of merged groups must also not collide with other records' ids.
  // (Handled above: every retained record registers its id.)
  return ds;
}

namespace {

std::vector<DataRecord> read_rows(const std::string& path, bool need_activity,
                                  std::vector<std::size_t>* activity_missing) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF)
    line.erase(0, 3);  // UTF-8 BOM

  auto header = split_csv_line(line);
  int id_col = -1, smiles_col = -1, activity_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string h = to_lower(header[i]);
    if (h == "id") id_col = static_cast<int>(i);
    if (h == "smiles") smiles_col = static_cast<int>(i);
    if (h == "activity") activity_col = static_cast<int>(i);
  }
  if (id_col < 0) throw DataError(path + ": missing 'id' column");
  if (smiles_col < 0) throw DataError(path + ": missing 'smiles' column");
  if (need_activity && activity_col < 0)
    throw DataError(path + ": missing 'activity' column");

  std::vector<DataRecord> rows;
  std::size_t row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    std::size_t need = static_cast<std::size_t>(std::max(id_col, smiles_col)) + 1;
    if (need_activity)
      need = std::max(need, static_cast<std::size_t>(activity_col) + 1);
    if (fields.size() < need)
      throw DataError("row " + std::to_string(row_number) + ": expected " +
                      std::to_string(need) + " columns, got " +
                      std::to_string(fields.size()));
    DataRecord r;
    r.id = fields[static_cast<std::size_t>(id_col)];
    r.smiles = fields[static_cast<std::size_t>(smiles_col)];
    r.source_row = row_number;
    if (activity_col >= 0 && static_cast<std::size_t>(activity_col) < fields.size() &&
        !fields[static_cast<std::size_t>(activity_col)].empty()) {
      r.activity = parse_activity(fields[static_cast<std::size_t>(activity_col)], row_number);
    } else if (need_activity) {
      throw DataError("row " + std::to_string(row_number) + ": missing activity");
    } else if (activity_missing) {
      activity_missing->push_back(row_number);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

Dataset load_csv(const std::string& path, ActivityTransform transform) {
  return curate(read_rows(path, /*need_activity=*/true, nullptr), transform, path);
}

std::vector<DataRecord> load_structures_csv(const std::string& path) {
  std::vector<std::size_t> missing;
  auto rows = read_rows(path, /*need_activity=*/false, &missing);
  for (const DataRecord& r : rows) {
    try {
      parse_smiles(r.smiles);
    } catch (const SmilesError& e) {
      throw DataError("row " + std::to_string(r.source_row) + ": " + e.what());
    }
  }
  return rows;
}

void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "id,smiles,activity\n";
  for (const DataRecord& r : ds.records)
    out << r.id << "," << r.smiles << "," << format_double(r.activity) << "\n";
}

SplitSpec stratified_split(const Dataset& ds, double train_fraction,
                           std::uint64_t seed) {
  if (!(train_fraction >= 0.5 && train_fraction <= 0.95))
    throw ConfigError("train fraction must be in [0.5,0.95]");
  const int n = static_cast<int>(ds.size());
  if (n < 12)
    throw DataError("dataset too small: " + std::to_string(n) +
                    " records (minimum 12)");

  const int train_count = static_cast<int>(std::llround(train_fraction * n));
  const int test_quota = n - train_count;

  std::vector<int> sorted_idx(ds.size());
  for (int i = 0; i < n; ++i) sorted_idx[i] = i;
  std::sort(sorted_idx.begin(), sorted_idx.end(), [&](int a, int b) {
    if (ds.records[a].activity != ds.records[b].activity)
      return ds.records[a].activity < ds.records[b].activity;
    return ds.records[a].id < ds.records[b].id;
  });

  const int block = static_cast<int>(std::llround(1.0 / (1.0 - train_fraction)));
  StableRng rng(seed);
  std::vector<bool> is_test(ds.size(), false);
  int picked = 0;
  for (int start = 0; start + block <= n && picked < test_quota; start += block) {
    const int offset = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(block)));
    is_test[static_cast<std::size_t>(sorted_idx[start + offset])] = true;
    ++picked;
  }
  // Global top-up over remaining candidates (covers the partial tail block
  // and any fraction where blocks alone cannot reach the quota).
  if (picked < test_quota) {
    std::vector<int> remaining;
    for (int i = 0; i < n; ++i)
      if (!is_test[static_cast<std::size_t>(sorted_idx[i])])
        remaining.push_back(sorted_idx[i]);
    while (picked < test_quota) {
      const std::size_t k =
          static_cast<std::size_t>(rng.bounded(remaining.size()));
      is_test[static_cast<std::size_t>(remaining[k])] = true;
      remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(k));
      ++picked;
    }
  }

  SplitSpec spec;
  spec.train_fraction = train_fraction;
  spec.seed = seed;
  for (int i = 0; i < n; ++i) {
    (is_test[static_cast<std::size_t>(i)] ? spec.test_ids : spec.train_ids)
        .push_back(ds.records[static_cast<std::size_t>(i)].id);
  }
  std::sort(spec.train_ids.begin(), spec.train_ids.end());
  std::sort(spec.test_ids.begin(), spec.test_ids.end());
  return spec;
}

int grid_interval_count(double frac_min, double frac_max, double step) {
  if (step <= 0.0) throw ConfigError("grid step must be positive");
  if (frac_min > frac_max) throw ConfigError("frac_min exceeds frac_max");
  return static_cast<int>(std::floor((frac_max - frac_min) / step + 1e-9)) + 1;
}

std::vector<SplitSpec> split_grid(const Dataset& ds, double frac_min,
                                  double frac_max, double step,
                                  int models_per_interval,
                                  std::uint64_t master_seed) {
  if (models_per_interval < 1)
    throw ConfigError("models per interval must be >= 1");
  const int intervals = grid_interval_count(frac_min, frac_max, step);
  std::vector<SplitSpec> splits;
  splits.reserve(static_cast<std::size_t>(intervals) *
                 static_cast<std::size_t>(models_per_interval));
  for (int i = 0; i < intervals; ++i) {
    const double fraction = frac_min + i * step;
    for (int j = 0; j < models_per_interval; ++j) {
      const std::uint64_t seed = hash_u64_span(
          master_seed, {static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)});
      splits.push_back(stratified_split(ds, fraction, seed));
    }
  }
  return splits;
}

}  // namespace autoqsar
