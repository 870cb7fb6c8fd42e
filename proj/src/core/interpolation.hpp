#pragma once

#include "kernel.hpp"
#include "types.hpp"

#include <span>
#include <vector>

namespace pwband {

// Minimum-norm interpolant f(x) = sum_k coefficients[k] k(x, centers[k]).
struct Interpolant {
  Eigen::VectorXd coefficients;
  std::vector<double> centers;
  KernelParams params;
};

Interpolant min_norm_interpolant(std::span<const double> xs, std::span<const double> ys,
                                 const KernelParams& params);

double evaluate(const Interpolant& f, double x);

// alpha' K alpha; equals y' K^-1 y for minimum-norm interpolants.
double norm_sq(const Interpolant& f);

}  // namespace pwband
