#pragma once

#include "band_noise_free.hpp"
#include "band_noisy.hpp"
#include "kernel.hpp"
#include "types.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace pwband {

// f*(x) = sum_k w_k k(x, c_k); coeffs already carry the normalization factor.
struct TrueFunction {
  std::vector<double> centers;
  Eigen::VectorXd coeffs;
  KernelParams params;
  double scale = 1.0;
};

enum class NoiseFamily { none, laplace, gaussian, uniform };

// Symmetric about zero; location is pinned at 0.
struct NoiseSpec {
  NoiseFamily family = NoiseFamily::none;
  double location = 0.0;
  double scale = 1.0;
};

struct Dataset {
  std::vector<double> xs;
  std::vector<double> ys;
};

// estimate: quadrature of f*^2 over [-50, 0] u [1, 51];
// remainder: analytic envelope bound beyond that range, so upper() bounds the
// true tail energy from above.
struct TailEnergy {
  double estimate = 0.0;
  double remainder = 0.0;
  double upper() const { return estimate + remainder; }
};

// Scales the coefficients so max |f*| <= 1 over a 1e4-point grid on [0, 1].
TrueFunction make_true_function(std::vector<double> centers, Eigen::VectorXd coeffs,
                                const KernelParams& params);

// centers ~ U[0,1], coeffs ~ U[-1,1], then normalized.
TrueFunction generate_true_function(std::uint64_t seed, const KernelParams& params,
                                    std::int64_t count = 20);

double true_eval(const TrueFunction& f, double x);

// Exact squared RKHS norm w' Kbar w over the centers.
double exact_norm_sq(const TrueFunction& f);

TailEnergy tail_energy(const TrueFunction& f);

// x_k ~ U[0,1], y_k = f*(x_k) + noise; input and noise draws use separate
// streams of the same seed, so the inputs do not depend on the noise family.
Dataset sample_dataset(const TrueFunction& f, std::int64_t n, const NoiseSpec& noise,
                       std::uint64_t seed);

// F(x'_k) per point. Throws non_monotone_cdf when the sampled order check
// finds raw_i < raw_j with F(raw_i) >= F(raw_j).
std::vector<double> uniformize(std::span<const double> raw,
                               const std::function<double(double)>& cdf);

enum class BandAlgorithm { noise_free, noisy };

struct CoverageConfig {
  BandAlgorithm algorithm = BandAlgorithm::noise_free;
  std::int64_t trials = 500;
  std::int64_t n = 10;
  std::int64_t grid_resolution = 512;
  double alpha = 0.1;
  double beta = 0.05;  // noisy only
  std::int64_t d = 0;  // 0: ceil(sqrt(n))
  double lambda = 0.1;
  std::int64_t m = 0;  // 0: policy from beta
  std::int64_t q = 0;
  std::int64_t perturbed_rows = -1;
  NoiseSpec noise;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: all cores
  KernelParams params;
  bool clip_unit = false;
};

struct CoverageReport {
  std::int64_t trials = 0;
  std::int64_t successes = 0;
  std::int64_t errors = 0;
  double empirical_reliability = 0.0;
  double guarantee = 0.0;
  // Mean over trials whose per-trial mean interval width is finite.
  double mean_width = 0.0;
  std::int64_t finite_width_trials = 0;
  std::int64_t unbounded_trials = 0;
  std::int64_t empty_trials = 0;
  CoverageConfig config;
};

using BandSink = std::function<void(std::int64_t trial, const Band& band)>;

// Per trial: draw f*, measure delta0 = tail_energy(f*).upper(), sample a
// dataset, build the band, succeed iff f*(x) lies inside a nonempty interval
// at every grid point. Trials run concurrently; aggregation and the optional
// sink are a sequential fold in trial order, so reports are bit-identical for
// a given config regardless of thread count. Per-trial errors count as
// failures and are tallied, not hidden.
CoverageReport coverage_experiment(const CoverageConfig& config, const BandSink& sink = {});

// Inclusive uniform grid on [0, 1]; count >= 2.
std::vector<double> linspace01(std::int64_t count);

}  // namespace pwband
