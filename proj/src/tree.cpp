#include <algorithm>
#include <cmath>
#include <numeric>

#include "learners_detail.hpp"

namespace autoqsar::detail {

namespace {

struct BestSplit {
  int feature = -1;
  double threshold = 0.0;
  double sse_after = 0.0;
  bool found = false;
};

double node_sse(const Eigen::VectorXd& y, const std::vector<int>& rows) {
  double mean = 0.0;
  for (int r : rows) mean += y(r);
  mean /= static_cast<double>(rows.size());
  double sse = 0.0;
  for (int r : rows) sse += (y(r) - mean) * (y(r) - mean);
  return sse;
}

// Exhaustive variance-reduction search. Candidates are midpoints between
// consecutive distinct sorted values; both children must satisfy min_leaf.
// Ties break to the smaller feature index, then the smaller threshold.
BestSplit find_split(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     const std::vector<int>& rows, int min_leaf) {
  BestSplit best;
  const double parent_sse = node_sse(y, rows);

  std::vector<int> order(rows);
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (x(a, f) != x(b, f)) return x(a, f) < x(b, f);
      return a < b;
    });
    // Prefix sums over the sorted order for O(1) SSE of each cut.
    double left_sum = 0.0, left_sq = 0.0;
    double total_sum = 0.0, total_sq = 0.0;
    for (int r : order) {
      total_sum += y(r);
      total_sq += y(r) * y(r);
    }
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      const int r = order[i];
      left_sum += y(r);
      left_sq += y(r) * y(r);
      const double xv = x(r, f);
      const double xnext = x(order[i + 1], f);
      if (xv == xnext) continue;  // not a boundary between distinct values
      const auto nl = static_cast<double>(i + 1);
      const auto nr = static_cast<double>(order.size() - i - 1);
      if (nl < min_leaf || nr < min_leaf) continue;
      const double right_sum = total_sum - left_sum;
      const double right_sq = total_sq - left_sq;
      const double sse =
          (left_sq - left_sum * left_sum / nl) + (right_sq - right_sum * right_sum / nr);
      const double threshold = 0.5 * (xv + xnext);
      const bool better =
          !best.found || sse < best.sse_after - 1e-12 ||
          (std::abs(sse - best.sse_after) <= 1e-12 &&
           (static_cast<int>(f) < best.feature ||
            (static_cast<int>(f) == best.feature && threshold < best.threshold)));
      if (better && parent_sse - sse > 1e-12) {
        best.found = true;
        best.feature = static_cast<int>(f);
        best.threshold = threshold;
        best.sse_after = sse;
      }
    }
  }
  return best;
}

int build_node(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
               std::vector<int> rows, int depth, int max_depth, int min_leaf,
               std::vector<TreeNode>& nodes) {
  const int index = static_cast<int>(nodes.size());
  nodes.emplace_back();
  TreeNode& node = nodes.back();
  node.depth = depth;
  node.count = static_cast<int>(rows.size());
  double mean = 0.0;
  for (int r : rows) mean += y(r);
  node.value = mean / static_cast<double>(rows.size());

  if (depth >= max_depth || static_cast<int>(rows.size()) < 2 * min_leaf)
    return index;

  BestSplit split = find_split(x, y, rows, min_leaf);
  if (!split.found) return index;

  std::vector<int> left_rows, right_rows;
  for (int r : rows)
    (x(r, split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);

  // `nodes` may reallocate during recursion; write via the index.
  nodes[static_cast<std::size_t>(index)].feature = split.feature;
  nodes[static_cast<std::size_t>(index)].threshold = split.threshold;
  const int left = build_node(x, y, std::move(left_rows), depth + 1, max_depth,
                              min_leaf, nodes);
  nodes[static_cast<std::size_t>(index)].left = left;
  const int right = build_node(x, y, std::move(right_rows), depth + 1, max_depth,
                               min_leaf, nodes);
  nodes[static_cast<std::size_t>(index)].right = right;
  return index;
}

}  // namespace

TreeModelState fit_tree(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        int max_depth, int min_leaf) {
  TreeModelState state;
  std::vector<int> rows(static_cast<std::size_t>(x.rows()));
  std::iota(rows.begin(), rows.end(), 0);
  build_node(x, y, std::move(rows), 0, max_depth, min_leaf, state.nodes);
  return state;
}

double tree_predict_row(const TreeModelState& tree, const Eigen::RowVectorXd& row) {
  int node = 0;
  while (tree.nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const TreeNode& n = tree.nodes[static_cast<std::size_t>(node)];
    node = row(n.feature) <= n.threshold ? n.left : n.right;
  }
  return tree.nodes[static_cast<std::size_t>(node)].value;
}

}  // namespace autoqsar::detail
