#include "band_noise_free.hpp"

#include "norm_bounds.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <optional>

namespace pwband {

namespace {

std::optional<std::size_t> collision_index(std::span<const double> xs, double x0) {
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (std::fabs(xs[k] - x0) <= kInputSeparation) return k;
  }
  return std::nullopt;
}

}  // namespace

ExtendedInverseBlocks partition_extended_inverse(std::span<const double> xs, double x0,
                                                 const KernelParams& params) {
  if (collision_index(xs, x0)) {
    throw error(errc::query_collision, "query point coincides with an observed input");
  }
  std::vector<double> pts;
  pts.reserve(xs.size() + 1);
  pts.push_back(x0);
  pts.insert(pts.end(), xs.begin(), xs.end());
  GramMatrix k0 = gram(pts, params);
  const auto n = static_cast<Eigen::Index>(xs.size());
  SpdFactor f(k0.entries, gram_pivot_floor(params));
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n + 1, n + 1);
  Eigen::MatrixXd inv = f.solve(eye);
  ExtendedInverseBlocks blocks;
  blocks.c = inv(0, 0);
  blocks.b = inv.block(1, 0, n, 1);
  blocks.a = inv.block(1, 1, n, n);
  if (!(blocks.c > 0.0)) {
    throw error(errc::ill_conditioned, "extended inverse lost positive definiteness");
  }
  return blocks;
}

IntervalPair interval_at(std::span<const double> xs, std::span<const double> ys, double x0,
                         const NormBudget& budget, const KernelParams& params) {
  if (xs.size() != ys.size()) {
    throw error(errc::invalid_argument, "inputs and outputs must have equal length");
  }
  if (!std::isfinite(budget.value)) {
    throw error(errc::invalid_argument, "norm budget must be finite");
  }
  if (auto k = collision_index(xs, x0)) return {ys[*k], ys[*k]};

  ExtendedInverseBlocks blocks = partition_extended_inverse(xs, x0, params);
  Eigen::Map<const Eigen::VectorXd> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
  const double a0 = blocks.c;
  const double b0 = 2.0 * blocks.b.dot(y);
  const double c0 = y.dot(blocks.a * y) - budget.value;

  double disc = b0 * b0 - 4.0 * a0 * c0;
  if (disc < -1e-12) return IntervalPair::empty_pair();
  if (disc <= 0.0) {
    double root = -b0 / (2.0 * a0);
    return {root, root};
  }
  double r1, r2;
  if (b0 == 0.0) {
    r1 = std::sqrt(-c0 / a0);
    r2 = -r1;
  } else {
    // Larger-magnitude root first, companion from the product c0 / a0.
    double s = -(b0 + std::copysign(std::sqrt(disc), b0)) / 2.0;
    r1 = s / a0;
    r2 = c0 / s;
  }
  return {std::min(r1, r2), std::max(r1, r2)};
}

void validate_grid(std::span<const double> grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) {
      throw error(errc::invalid_argument, "grid points must lie in [0, 1]");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw error(errc::invalid_argument, "grid must be strictly increasing");
    }
  }
}

Band band(std::span<const double> xs, std::span<const double> ys, std::span<const double> grid,
          double alpha, double delta0, const KernelParams& params) {
  if (xs.size() != ys.size() || xs.empty()) {
    throw error(errc::invalid_argument, "need equally many inputs and outputs, at least one");
  }
  validate_grid(grid);
  NormBudget budget = noise_free_bound(ys, alpha, delta0);

  GramMatrix g = gram(xs, params);
  const auto n = static_cast<Eigen::Index>(xs.size());
  Eigen::Map<const Eigen::VectorXd> y(ys.data(), n);
  const double k00 = params.eta / 3.14159265358979323846;
  const double eps = std::numeric_limits<double>::epsilon();

  // Certified interval: for any weight vectors a ~= K^-1 y, c ~= K^-1 k0 the
  // reproducing property gives |f(x0) - center| <= sqrt(w1sq) * sqrt(r) for
  // every f interpolating y with ||f||^2 <= budget; the eps-scale pads cover
  // the float evaluation error of r and center.
  Eigen::MatrixXd kinv = floored_inverse(g.entries, 1e-12);
  Eigen::VectorXd a = kinv * y;
  Eigen::VectorXd ka = g.entries * a;
  const double a1 = a.lpNorm<1>();
  const double w1sq = budget.value - 2.0 * a.dot(y) + a.dot(ka);

  Band out;
  out.grid.assign(grid.begin(), grid.end());
  out.intervals.resize(grid.size());
  out.risk = alpha;
  out.meta.algorithm = "noise-free";
  out.meta.eta = params.eta;
  out.meta.n = n;
  out.meta.alpha = alpha;
  out.meta.delta0 = delta0;
  out.meta.bound_value = budget.value;

  for (std::size_t i = 0; i < grid.size(); ++i) {
    double x0 = grid[i];
    if (auto k = collision_index(xs, x0)) {
      out.intervals[i] = {ys[*k], ys[*k]};
      continue;
    }
    if (w1sq < 0.0) {
      out.intervals[i] = IntervalPair::empty_pair();
      continue;
    }
    Eigen::VectorXd k0 = kernel_vector(xs, x0, params);
    Eigen::VectorXd c = kinv * k0;
    const double c1 = c.lpNorm<1>();
    double center = c.dot(y) + a.dot(k0) - c.dot(ka);
    double r = std::max(k00 - 2.0 * c.dot(k0) + c.dot(g.entries * c), 0.0) +
               16.0 * eps * k00 * (1.0 + c1) * (1.0 + c1);
    double h = std::sqrt(w1sq * r) + 16.0 * eps * k00 * (1.0 + c1) * (1.0 + a1);
    out.intervals[i] = {center - h, center + h};
  }
  return out;
}

}  // namespace pwband
