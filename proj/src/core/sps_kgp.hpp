#pragma once

#include "kernel.hpp"
#include "types.hpp"

#include <cstdint>
#include <span>
#include <utility>

namespace pwband {

// Canonical OLS reformulation of the kernel ridge objective:
// phi = [(1/sqrt(n)) W^{1/2} K1 ; sqrt(lambda) K2^{1/2}], v = [(1/sqrt(n)) W^{1/2} y ; 0].
struct OlsProblem {
  Eigen::MatrixXd phi;
  Eigen::VectorXd v;
  std::int64_t data_rows = 0;
  std::int64_t perturbed_rows = 0;
  double ridge = 0.0;
  Eigen::VectorXd weights;
};

struct SpsConfig {
  std::int64_t m = 20;
  std::int64_t q = 1;
  std::uint64_t seed = 0;
};

struct ConfidenceEllipsoid {
  Eigen::VectorXd center;
  Eigen::MatrixXd shape;  // R = (1/n) phi' phi
  double radius = 0.0;    // may be +inf
  bool empty_marker = false;
  double risk = 0.0;

  bool unbounded() const { return std::isinf(radius); }
};

// K with the last n-d columns removed (n x d).
Eigen::MatrixXd k1_matrix(std::span<const double> xs, std::int64_t d,
                          const KernelParams& params);

// Empty weights mean the identity weighting.
OlsProblem build_ols(std::span<const double> xs, std::span<const double> ys, std::int64_t d,
                     double lambda, std::span<const double> weights, const KernelParams& params);

// Sign-perturbed-sums ellipsoidal outer approximation. Signs for perturbation
// i come from the counter stream (seed, i), so parallel and serial runs agree
// bit for bit. Unbounded gamma values participate in the q-th-largest
// selection as +inf.
ConfidenceEllipsoid sps_ellipsoid(const OlsProblem& problem, const SpsConfig& config);

// Simultaneous intervals at the first d observed inputs; phi_k is row k of K1.
ObservedIntervals observed_intervals(const ConfidenceEllipsoid& ell, const Eigen::MatrixXd& k1);

// (m, q) from a requested risk: m = max(20, ceil(2/beta)), q = floor(beta*m),
// q >= 1; achieved risk q/m never exceeds beta.
std::pair<std::int64_t, std::int64_t> sps_policy(double beta);

}  // namespace pwband
