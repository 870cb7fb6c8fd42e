#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace pwband {

enum class errc {
  invalid_argument,
  duplicate_inputs,
  ill_conditioned,
  not_psd,
  invalid_risk,
  empty_observed_intervals,
  degenerate_design,
  no_strictly_feasible_point,
  query_collision,
  non_monotone_cdf,
  infeasible,
  io_error,
};

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

// Inputs closer than this are treated as the same point.
inline constexpr double kInputSeparation = 1e-9;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Empty interval is exactly (1, -1).
struct IntervalPair {
  double lower = 1.0;
  double upper = -1.0;

  bool empty() const { return lower > upper; }
  bool contains(double v) const { return lower <= v && v <= upper; }
  static IntervalPair empty_pair() { return {1.0, -1.0}; }
  static IntervalPair unbounded_pair() { return {-kInf, kInf}; }
};

// High-probability upper bound on the squared RKHS norm (kappa or tau).
struct NormBudget {
  double value = 0.0;
  double risk = 0.0;
  double delta0 = 0.0;
  std::int64_t sample_count = 0;
};

// Simultaneous intervals [nu_k, mu_k] at the first d observed inputs.
// Either nu_k <= mu_k for all k, or the uniform empty marker (1, -1).
struct ObservedIntervals {
  Eigen::VectorXd lowers;
  Eigen::VectorXd uppers;
  double risk = 0.0;
  bool empty_marker = false;

  std::int64_t size() const { return lowers.size(); }
  bool unbounded() const {
    return !empty_marker && lowers.size() > 0 && !std::isfinite(lowers[0]);
  }
};

}  // namespace pwband
