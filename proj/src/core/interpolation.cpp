#include "interpolation.hpp"

namespace pwband {

Interpolant min_norm_interpolant(std::span<const double> xs, std::span<const double> ys,
                                 const KernelParams& params) {
  if (xs.size() != ys.size() || xs.empty()) {
    throw error(errc::invalid_argument, "need equally many inputs and outputs, at least one");
  }
  GramMatrix g = gram(xs, params);
  Eigen::Map<const Eigen::VectorXd> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
  Interpolant f;
  f.coefficients = solve_spd(g, y);
  f.centers = std::move(g.inputs);
  f.params = params;
  return f;
}

double evaluate(const Interpolant& f, double x) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < f.coefficients.size(); ++k) {
    acc += f.coefficients[k] * kernel_eval(x, f.centers[static_cast<std::size_t>(k)], f.params);
  }
  return acc;
}

double norm_sq(const Interpolant& f) {
  if (f.coefficients.size() == 0) return 0.0;
  const auto n = static_cast<Eigen::Index>(f.centers.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      double v = kernel_eval(f.centers[static_cast<std::size_t>(i)],
                             f.centers[static_cast<std::size_t>(j)], f.params);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return f.coefficients.dot(k * f.coefficients);
}

}  // namespace pwband
