#pragma once

#include "kernel.hpp"
#include "types.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pwband {

struct BandMeta {
  std::string algorithm;
  double eta = 0.0;
  std::int64_t n = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double delta0 = 0.0;
  // kappa (noise-free) or tau (noisy).
  double bound_value = 0.0;
  std::int64_t d = 0;
  std::int64_t m = 0;
  std::int64_t q = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::int64_t perturbed_rows = 0;
  bool clip_unit = false;
};

struct Band {
  std::vector<double> grid;
  std::vector<IntervalPair> intervals;
  double risk = 0.0;
  BandMeta meta;
};

// Blocks of the inverse of the Gram over (x0, x_1..x_n): scalar c (> 0),
// vector b, matrix A.
struct ExtendedInverseBlocks {
  double c = 0.0;
  Eigen::VectorXd b;
  Eigen::MatrixXd a;
};

ExtendedInverseBlocks partition_extended_inverse(std::span<const double> xs, double x0,
                                                 const KernelParams& params);

// Table-style interval at one query: roots of a0 y0^2 + b0 y0 + c0 with
// a0 = c, b0 = 2 b'y, c0 = y'Ay - budget; (1, -1) when the discriminant is
// negative; (y_k, y_k) when x0 collides with an observed input.
IntervalPair interval_at(std::span<const double> xs, std::span<const double> ys, double x0,
                         const NormBudget& budget, const KernelParams& params);

// Full noise-free band: budget computed once, one interval per grid point via
// a certified fast path that reuses a single factorization; matches
// interval_at within 1e-8 on well-conditioned data and errs only outward.
Band band(std::span<const double> xs, std::span<const double> ys, std::span<const double> grid,
          double alpha, double delta0, const KernelParams& params);

// Shared validation: grid strictly increasing inside [0, 1].
void validate_grid(std::span<const double> grid);

}  // namespace pwband
