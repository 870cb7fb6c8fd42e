#include "kernel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace pwband {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDiagonalSwitch = 1e-7;
}  // namespace

void validate(const KernelParams& params) {
  if (!(params.eta > 0.0) || !std::isfinite(params.eta)) {
    throw error(errc::invalid_argument, "kernel band limit eta must be positive");
  }
}

double kernel_eval(double z, double s, const KernelParams& params) noexcept {
  // Even in z - s; computed from |z - s| so the symmetry is exact in
  // floating point, not dependent on libm's sin being odd.
  double ad = std::fabs(z - s);
  if (ad <= kDiagonalSwitch) {
    double t = params.eta * ad;
    return params.eta / kPi * (1.0 - t * t / 6.0);
  }
  return std::sin(params.eta * ad) / (kPi * ad);
}

double gram_pivot_floor(const KernelParams& params) { return 1e-12 * params.eta / kPi; }

GramMatrix gram(std::span<const double> inputs, const KernelParams& params) {
  validate(params);
  const auto n = static_cast<Eigen::Index>(inputs.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::fabs(inputs[i] - inputs[j]) <= kInputSeparation) {
        throw error(errc::duplicate_inputs, "inputs coincide within separation tolerance");
      }
    }
  }
  GramMatrix g;
  g.inputs.assign(inputs.begin(), inputs.end());
  g.entries.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g.entries(i, i) = params.eta / kPi;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double v = kernel_eval(inputs[i], inputs[j], params);
      g.entries(i, j) = v;
      g.entries(j, i) = v;
    }
  }
  if (n > 0) SpdFactor check(g.entries, gram_pivot_floor(params));
  return g;
}

Eigen::VectorXd kernel_vector(std::span<const double> inputs, double x0,
                              const KernelParams& params) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(inputs.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = kernel_eval(x0, inputs[static_cast<std::size_t>(i)], params);
  }
  return v;
}

SpdFactor::SpdFactor(const Eigen::MatrixXd& m, double pivot_floor) {
  ldlt_.compute(m);
  if (ldlt_.info() != Eigen::Success || ldlt_.vectorD().minCoeff() <= pivot_floor) {
    throw error(errc::ill_conditioned, "symmetric factorization pivot below floor");
  }
}

Eigen::VectorXd solve_spd(const GramMatrix& g, const Eigen::VectorXd& rhs) {
  if (g.entries.rows() != rhs.size()) {
    throw error(errc::invalid_argument, "solve_spd dimension mismatch");
  }
  if (rhs.size() == 0) return rhs;
  SpdFactor f(g.entries, 1e-12 * g.entries.diagonal().maxCoeff());
  Eigen::VectorXd x = f.solve(rhs);
  // Two refinement passes push the residual to the rounding floor even when
  // the gram spectrum has plunged past the time-bandwidth limit.
  for (int pass = 0; pass < 2; ++pass) {
    Eigen::VectorXd r = rhs - g.entries * x;
    x += f.solve(r);
  }
  return x;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw error(errc::invalid_argument, "psd_sqrt needs square input");
  if (m.rows() == 0) return m;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success) {
    throw error(errc::ill_conditioned, "eigendecomposition failed");
  }
  Eigen::VectorXd lam = es.eigenvalues();
  double scale = std::max(std::fabs(lam.minCoeff()), std::fabs(lam.maxCoeff()));
  if (lam.minCoeff() < -1e-10 * scale) {
    throw error(errc::not_psd, "matrix has an eigenvalue below the PSD tolerance");
  }
  Eigen::VectorXd root = lam.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd floored_inverse(const Eigen::MatrixXd& m, double floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success) {
    throw error(errc::ill_conditioned, "eigendecomposition failed");
  }
  Eigen::VectorXd inv = es.eigenvalues().cwiseMax(floor).cwiseInverse();
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace pwband
