#include "band_noisy.hpp"

#include "convex_opt.hpp"
#include "norm_bounds.hpp"

#include <cmath>

namespace pwband {

IntervalPair interval_at_noisy(std::span<const double> xs_d, const ObservedIntervals& intervals,
                               double x0, const NormBudget& budget, const KernelParams& params) {
  const auto d = static_cast<Eigen::Index>(xs_d.size());
  if (intervals.size() != d || d < 1) {
    throw error(errc::invalid_argument, "interval count must match the observed inputs");
  }
  if (intervals.empty_marker) return IntervalPair::empty_pair();
  if (std::isinf(budget.value)) return IntervalPair::unbounded_pair();
  for (double xk : xs_d) {
    if (std::fabs(xk - x0) <= kInputSeparation) {
      throw error(errc::query_collision, "query point coincides with an observed input");
    }
  }

  std::vector<double> pts;
  pts.reserve(xs_d.size() + 1);
  pts.push_back(x0);
  pts.insert(pts.end(), xs_d.begin(), xs_d.end());
  GramMatrix k0 = gram(pts, params);

  BoxedEllipsoid problem;
  // Flooring the small eigenvalues enlarges the feasible set: conservative.
  problem.quad.matrix = floored_inverse(k0.entries, 1e-12);
  problem.quad.linear = Eigen::VectorXd::Zero(d + 1);
  problem.quad.constant = 0.0;
  problem.level = budget.value;
  problem.box.lower.resize(d + 1);
  problem.box.upper.resize(d + 1);
  problem.box.lower[0] = -kInf;
  problem.box.upper[0] = kInf;
  problem.box.lower.tail(d) = intervals.lowers;
  problem.box.upper.tail(d) = intervals.uppers;

  auto extent = linear_extent(problem);
  if (!extent) return IntervalPair::empty_pair();
  return {extent->first, extent->second};
}

Band band_noisy(std::span<const double> xs, std::span<const double> ys,
                std::span<const double> grid, const NoisyBandConfig& config,
                const KernelParams& params) {
  validate(params);
  const auto n = static_cast<std::int64_t>(xs.size());
  if (xs.size() != ys.size() || n < 1) {
    throw error(errc::invalid_argument, "need equally many inputs and outputs, at least one");
  }
  if (!(config.alpha > 0.0 && config.alpha < 1.0) || !(config.beta > 0.0 && config.beta < 1.0)) {
    throw error(errc::invalid_risk, "risk must lie strictly inside (0, 1)");
  }
  if (!(config.alpha + config.beta < 1.0)) {
    throw error(errc::invalid_risk, "total risk alpha + beta must stay below 1");
  }
  std::int64_t d = config.d;
  if (d == 0) d = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  if (d < 1 || d > n) throw error(errc::invalid_argument, "need 1 <= d <= n");
  validate_grid(grid);

  std::int64_t m = config.m;
  std::int64_t q = config.q;
  if (m == 0 || q == 0) {
    auto mq = sps_policy(config.beta);
    if (m == 0) m = mq.first;
    if (q == 0) q = mq.second;
  }
  if (static_cast<double>(q) / static_cast<double>(m) > config.beta + 1e-12) {
    throw error(errc::invalid_risk, "q/m exceeds the requested beta");
  }

  OlsProblem problem = build_ols(xs, ys, d, config.lambda, config.weights, params);
  if (config.perturbed_rows >= 0) {
    if (config.perturbed_rows > n) {
      throw error(errc::invalid_argument, "cannot perturb more rows than there are data rows");
    }
    problem.perturbed_rows = config.perturbed_rows;
  }
  Eigen::MatrixXd k1 = k1_matrix(xs, d, params);
  ConfidenceEllipsoid ell = sps_ellipsoid(problem, SpsConfig{m, q, config.seed});
  ObservedIntervals obs = observed_intervals(ell, k1);

  Band out;
  out.grid.assign(grid.begin(), grid.end());
  out.intervals.resize(grid.size());
  out.risk = config.alpha + config.beta;
  out.meta.algorithm = "noisy";
  out.meta.eta = params.eta;
  out.meta.n = n;
  out.meta.alpha = config.alpha;
  out.meta.beta = config.beta;
  out.meta.delta0 = config.delta0;
  out.meta.d = d;
  out.meta.m = m;
  out.meta.q = q;
  out.meta.lambda = config.lambda;
  out.meta.seed = config.seed;
  out.meta.perturbed_rows = problem.perturbed_rows;
  out.meta.clip_unit = config.clip_unit;

  auto clip = [&](IntervalPair p) {
    if (!config.clip_unit || p.empty()) return p;
    p.lower = std::max(p.lower, -1.0);
    p.upper = std::min(p.upper, 1.0);
    if (p.lower > p.upper) return IntervalPair::empty_pair();
    return p;
  };

  if (obs.empty_marker) {
    for (auto& iv : out.intervals) iv = IntervalPair::empty_pair();
    out.meta.bound_value = std::nan("");
    return out;
  }

  NormBudget tau = noisy_bound(obs, config.alpha, config.delta0);
  out.meta.bound_value = tau.value;

  std::span<const double> xs_d = xs.subspan(0, static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double x0 = grid[i];
    IntervalPair iv;
    bool collided = false;
    for (std::int64_t k = 0; k < d; ++k) {
      if (std::fabs(xs_d[static_cast<std::size_t>(k)] - x0) <= kInputSeparation) {
        iv = {obs.lowers[k], obs.uppers[k]};
        collided = true;
        break;
      }
    }
    if (!collided) {
      iv = std::isinf(tau.value) ? IntervalPair::unbounded_pair()
                                 : interval_at_noisy(xs_d, obs, x0, tau, params);
    }
    out.intervals[i] = clip(iv);
  }
  return out;
}

}  // namespace pwband
