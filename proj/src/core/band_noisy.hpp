#pragma once

#include "band_noise_free.hpp"
#include "sps_kgp.hpp"
#include "types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace pwband {

struct NoisyBandConfig {
  double alpha = 0.05;
  double beta = 0.05;
  std::int64_t d = 0;  // 0: default ceil(sqrt(n))
  double lambda = 0.1;
  std::vector<double> weights;  // empty: identity
  std::uint64_t seed = 0;
  std::int64_t m = 0;  // 0: policy from beta
  std::int64_t q = 0;
  double delta0 = 0.0;
  bool clip_unit = false;
  // -1: keep the builder's default (first d data rows). Setting data_rows
  // perturbs every noise row; regularization rows are never perturbed.
  std::int64_t perturbed_rows = -1;
};

// Interval at one query from the observed intervals and the tau budget:
// extent of z0 over {(z0,z) K0tilde^-1 (z0,z)' <= tau, z_k in [nu_k, mu_k]}.
IntervalPair interval_at_noisy(std::span<const double> xs_d, const ObservedIntervals& intervals,
                               double x0, const NormBudget& budget, const KernelParams& params);

Band band_noisy(std::span<const double> xs, std::span<const double> ys,
                std::span<const double> grid, const NoisyBandConfig& config,
                const KernelParams& params);

}  // namespace pwband
