#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "autoqsar/molgraph.hpp"

namespace autoqsar {

struct DescriptorVector {
  std::vector<double> values;  // catalog order, always full length
  std::string source_id;
};

struct CatalogEntry {
  std::string name;
  std::string definition;
  std::string units;
};

// The fixed descriptor catalog. Ordering defines DescriptorVector layout
// and the greedy scan order of the correlation filter.
class DescriptorCatalog {
 public:
  static const DescriptorCatalog& instance();

  const std::vector<CatalogEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const std::string& version() const { return version_; }
  int index_of(const std::string& name) const;  // -1 if absent
  std::string to_csv() const;

 private:
  DescriptorCatalog();
  std::vector<CatalogEntry> entries_;
  std::string version_;
};

// Full catalog vector for one molecule. All entries finite; degenerate
// graphs (single atom, no paths) produce the documented zero conventions.
DescriptorVector compute_descriptors(const Molecule& mol,
                                     const std::string& source_id = {});

// Greedy correlation filter over descriptor columns, catalog order:
// a column is dropped when its variance is zero or its absolute Pearson
// correlation with any earlier retained column exceeds max_r.
// `matrix` is molecules x descriptors. Requires >= 3 rows.
// Throws ConfigError on bad max_r, DataError when every column is constant.
std::vector<int> correlation_filter(const Eigen::MatrixXd& matrix, double max_r);

}  // namespace autoqsar
