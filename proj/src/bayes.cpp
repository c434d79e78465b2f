#include <algorithm>
#include <cmath>

#include "autoqsar/errors.hpp"
#include "learners_detail.hpp"

namespace autoqsar::detail {

BayesModelState fit_bayes(const std::vector<std::vector<std::uint8_t>>& bits,
                          const std::vector<int>& active, double alpha,
                          double threshold) {
  const auto n = bits.size();
  if (n == 0 || bits[0].empty()) throw DataError("bayes: empty feature block");
  const auto width = bits[0].size();

  long n_active = 0;
  for (int a : active) n_active += a;
  const long n_inactive = static_cast<long>(n) - n_active;
  if (n_active == 0 || n_inactive == 0)
    throw DataError("bayes: classification threshold leaves a class empty");

  BayesModelState state;
  state.threshold = threshold;
  state.bits = static_cast<int>(width);
  state.log_prior_active = std::log(static_cast<double>(n_active) / n);
  state.log_prior_inactive = std::log(static_cast<double>(n_inactive) / n);

  // Only bits observed in training carry likelihood terms: bits that never
  // fire would otherwise each contribute a constant class-size artifact,
  // and thousands of them swamp the informative ones.
  std::vector<long> on_active_counts, on_inactive_counts;
  for (std::size_t j = 0; j < width; ++j) {
    long on_active = 0, on_inactive = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (bits[i][j]) {
        if (active[i]) ++on_active;
        else ++on_inactive;
      }
    }
    if (on_active + on_inactive == 0) continue;
    state.included.push_back(static_cast<int>(j));
    on_active_counts.push_back(on_active);
    on_inactive_counts.push_back(on_inactive);
  }

  const auto m = static_cast<Eigen::Index>(state.included.size());
  state.log_p1_active.resize(m);
  state.log_p0_active.resize(m);
  state.log_p1_inactive.resize(m);
  state.log_p0_inactive.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double p_active =
        (on_active_counts[static_cast<std::size_t>(k)] + alpha) / (n_active + 2.0 * alpha);
    const double p_inactive =
        (on_inactive_counts[static_cast<std::size_t>(k)] + alpha) /
        (n_inactive + 2.0 * alpha);
    state.log_p1_active(k) = std::log(p_active);
    state.log_p0_active(k) = std::log1p(-p_active);
    state.log_p1_inactive(k) = std::log(p_inactive);
    state.log_p0_inactive(k) = std::log1p(-p_inactive);
  }
  return state;
}

double bayes_p_active(const BayesModelState& state, const std::vector<std::uint8_t>& bits) {
  if (static_cast<int>(bits.size()) != state.bits)
    throw ConfigError("bayes: feature width mismatch");
  double log_active = state.log_prior_active;
  double log_inactive = state.log_prior_inactive;
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(state.included.size()); ++k) {
    if (bits[static_cast<std::size_t>(state.included[static_cast<std::size_t>(k)])]) {
      log_active += state.log_p1_active(k);
      log_inactive += state.log_p1_inactive(k);
    } else {
      log_active += state.log_p0_active(k);
      log_inactive += state.log_p0_inactive(k);
    }
  }
  // Softmax over the two classes, stable in log space; clamped away from
  // the endpoints so posteriors stay strictly inside (0,1) even when one
  // class underflows.
  const double m = std::max(log_active, log_inactive);
  const double za = std::exp(log_active - m);
  const double zi = std::exp(log_inactive - m);
  const double p = za / (za + zi);
  return std::clamp(p, 1e-15, 1.0 - 1e-15);
}

}  // namespace autoqsar::detail
