#include "norm_bounds.hpp"

#include <cmath>

namespace pwband {

namespace {

void check_risk(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw error(errc::invalid_risk, "risk must lie strictly inside (0, 1)");
  }
}

void check_delta0(double delta0) {
  if (!(delta0 >= 0.0) || !std::isfinite(delta0)) {
    throw error(errc::invalid_argument, "delta0 must be a nonnegative real");
  }
}

double hoeffding_term(double alpha, std::int64_t n) {
  return std::sqrt(std::log(alpha) / (-2.0 * static_cast<double>(n)));
}

}  // namespace

NormBudget noise_free_bound(std::span<const double> ys, double alpha, double delta0) {
  check_risk(alpha);
  check_delta0(delta0);
  if (ys.empty()) throw error(errc::invalid_argument, "need at least one output");
  double mean_sq = 0.0;
  for (double y : ys) mean_sq += y * y;
  mean_sq /= static_cast<double>(ys.size());
  NormBudget b;
  b.sample_count = static_cast<std::int64_t>(ys.size());
  b.risk = alpha;
  b.delta0 = delta0;
  b.value = mean_sq + hoeffding_term(alpha, b.sample_count) + delta0;
  return b;
}

NormBudget noisy_bound(const ObservedIntervals& intervals, double alpha, double delta0) {
  check_risk(alpha);
  check_delta0(delta0);
  if (intervals.empty_marker) {
    throw error(errc::empty_observed_intervals, "observed intervals carry the empty marker");
  }
  const auto d = intervals.size();
  if (d < 1) throw error(errc::invalid_argument, "need at least one observed interval");
  double mean_max_sq = 0.0;
  for (Eigen::Index k = 0; k < d; ++k) {
    double lo = intervals.lowers[k];
    double hi = intervals.uppers[k];
    if (lo > hi) throw error(errc::invalid_argument, "observed interval with lower > upper");
    mean_max_sq += std::max(lo * lo, hi * hi);
  }
  mean_max_sq /= static_cast<double>(d);
  NormBudget b;
  b.sample_count = d;
  b.risk = alpha;
  b.delta0 = delta0;
  b.value = mean_max_sq + hoeffding_term(alpha, d) + delta0;
  return b;
}

}  // namespace pwband
