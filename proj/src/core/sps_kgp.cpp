#include "sps_kgp.hpp"

#include "convex_opt.hpp"
#include "rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace pwband {

Eigen::MatrixXd k1_matrix(std::span<const double> xs, std::int64_t d,
                          const KernelParams& params) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  if (d < 1 || d > n) throw error(errc::invalid_argument, "need 1 <= d <= n");
  Eigen::MatrixXd k1(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      k1(i, j) = kernel_eval(xs[static_cast<std::size_t>(i)], xs[static_cast<std::size_t>(j)],
                             params);
    }
  }
  return k1;
}

OlsProblem build_ols(std::span<const double> xs, std::span<const double> ys, std::int64_t d,
                     double lambda, std::span<const double> weights,
                     const KernelParams& params) {
  validate(params);
  const auto n = static_cast<Eigen::Index>(xs.size());
  if (ys.size() != xs.size()) {
    throw error(errc::invalid_argument, "inputs and outputs must have equal length");
  }
  if (d < 1 || d > n) throw error(errc::invalid_argument, "need 1 <= d <= n");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw error(errc::invalid_argument, "ridge lambda must be positive");
  }
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  if (!weights.empty()) {
    if (weights.size() != xs.size()) {
      throw error(errc::invalid_argument, "weights must match the sample count");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(weights[static_cast<std::size_t>(i)] > 0.0)) {
        throw error(errc::invalid_argument, "weights must be positive");
      }
      w[i] = weights[static_cast<std::size_t>(i)];
    }
  }

  Eigen::MatrixXd k1 = k1_matrix(xs, d, params);
  Eigen::MatrixXd k2 = k1.topRows(d);
  Eigen::MatrixXd k2_root = psd_sqrt(0.5 * (k2 + k2.transpose()));

  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::VectorXd w_root = w.cwiseSqrt();

  OlsProblem p;
  p.phi.resize(n + d, d);
  p.phi.topRows(n) = inv_sqrt_n * w_root.asDiagonal() * k1;
  p.phi.bottomRows(d) = std::sqrt(lambda) * k2_root;
  p.v.resize(n + d);
  Eigen::Map<const Eigen::VectorXd> y(ys.data(), n);
  p.v.head(n) = inv_sqrt_n * w_root.cwiseProduct(y);
  p.v.tail(d).setZero();
  p.data_rows = n;
  p.perturbed_rows = d;
  p.ridge = lambda;
  p.weights = std::move(w);
  return p;
}

ConfidenceEllipsoid sps_ellipsoid(const OlsProblem& problem, const SpsConfig& config) {
  if (config.m < 2 || config.q < 1 || config.q >= config.m) {
    throw error(errc::invalid_argument, "need 1 <= q < m and m >= 2");
  }
  const Eigen::Index rows = problem.phi.rows();
  const Eigen::Index d = problem.phi.cols();
  const auto n = static_cast<double>(problem.data_rows);
  if (problem.data_rows < 1 || problem.v.size() != rows || d < 1) {
    throw error(errc::invalid_argument, "malformed OLS problem");
  }
  if (problem.perturbed_rows < 0 || problem.perturbed_rows > rows) {
    throw error(errc::invalid_argument, "perturbed row count out of range");
  }
  if (!problem.phi.allFinite() || !problem.v.allFinite()) {
    throw error(errc::degenerate_design, "design contains non-finite entries");
  }

  Eigen::MatrixXd r = (problem.phi.transpose() * problem.phi) / n;
  r = 0.5 * (r + r.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r);
  if (es.info() != Eigen::Success || !(es.eigenvalues().maxCoeff() > 0.0)) {
    throw error(errc::degenerate_design, "shape matrix R is singular");
  }
  const double lam_max = es.eigenvalues().maxCoeff();
  // One fixed inverse weighting shared by both sides of every comparison.
  Eigen::MatrixXd m_inv = floored_inverse(r, 1e-14 * lam_max);

  Eigen::VectorXd theta =
      problem.phi.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(problem.v);
  Eigen::VectorXd rho0 = (problem.phi.transpose() * problem.v) / n;

  QuadraticForm objective{r, -(r * theta), theta.dot(r * theta)};

  const auto pert = static_cast<Eigen::Index>(problem.perturbed_rows);
  std::vector<double> gammas;
  gammas.reserve(static_cast<std::size_t>(config.m - 1));
  for (std::int64_t i = 1; i < config.m; ++i) {
    CounterRng rng(config.seed, static_cast<std::uint64_t>(i), kStreamSpsSigns);
    Eigen::MatrixXd phi_s = problem.phi;
    Eigen::VectorXd v_s = problem.v;
    for (Eigen::Index k = 0; k < pert; ++k) {
      if (rng.sign() < 0) {
        phi_s.row(k) = -phi_s.row(k);
        v_s[k] = -v_s[k];
      }
    }
    Eigen::MatrixXd qi = (problem.phi.transpose() * phi_s) / n;
    qi = 0.5 * (qi + qi.transpose());
    Eigen::VectorXd rhoi = (problem.phi.transpose() * v_s) / n;

    // gamma_i = sup (theta-hat)'R(theta-hat) over
    // {(theta-hat)'R(theta-hat) <= ||R^{-1/2}(rho_i - Q_i theta)||^2}.
    QuadraticForm constraint;
    constraint.matrix = r - qi * m_inv * qi;
    constraint.linear = -(r * theta) + qi * m_inv * rhoi;
    constraint.constant = theta.dot(r * theta) - rhoi.dot(m_inv * rhoi);
    double gamma;
    try {
      gamma = qcqp_max(objective, constraint);
    } catch (const error& e) {
      if (e.code() != errc::no_strictly_feasible_point) throw;
      gamma = kInf;  // degenerate draw; +inf keeps the guarantee direction
    }
    gammas.push_back(gamma);
  }

  std::sort(gammas.begin(), gammas.end(), std::greater<double>());
  ConfidenceEllipsoid ell;
  ell.center = std::move(theta);
  ell.shape = std::move(r);
  ell.radius = gammas[static_cast<std::size_t>(config.q - 1)];
  ell.risk = static_cast<double>(config.q) / static_cast<double>(config.m);
  return ell;
}

ObservedIntervals observed_intervals(const ConfidenceEllipsoid& ell, const Eigen::MatrixXd& k1) {
  const Eigen::Index d = k1.cols();
  ObservedIntervals out;
  out.risk = ell.risk;
  out.lowers.resize(d);
  out.uppers.resize(d);
  if (ell.empty_marker) {
    out.lowers.setOnes();
    out.uppers.setConstant(-1.0);
    out.empty_marker = true;
    return out;
  }
  if (k1.rows() < d || ell.center.size() != d) {
    throw error(errc::invalid_argument, "K1 and ellipsoid dimensions disagree");
  }
  if (ell.unbounded()) {
    out.lowers.setConstant(-kInf);
    out.uppers.setConstant(kInf);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ell.shape);
  if (es.info() != Eigen::Success) {
    throw error(errc::ill_conditioned, "shape eigendecomposition failed");
  }
  // Tiny clamp only; under-flooring over-estimates phi'R^-1 phi, which widens.
  Eigen::VectorXd lam =
      es.eigenvalues().cwiseMax(1e-16 * std::max(es.eigenvalues().maxCoeff(), 0.0));
  for (Eigen::Index k = 0; k < d; ++k) {
    Eigen::VectorXd phi_k = k1.row(k).transpose();
    double mid = phi_k.dot(ell.center);
    Eigen::VectorXd proj = es.eigenvectors().transpose() * phi_k;
    double quad = (proj.array().square() / lam.array()).sum();
    double half = std::sqrt(std::max(ell.radius, 0.0) * std::max(quad, 0.0));
    out.lowers[k] = mid - half;
    out.uppers[k] = mid + half;
  }
  return out;
}

std::pair<std::int64_t, std::int64_t> sps_policy(double beta) {
  if (!(beta > 0.0) || !(beta < 1.0)) {
    throw error(errc::invalid_risk, "risk must lie strictly inside (0, 1)");
  }
  auto m = static_cast<std::int64_t>(std::max(20.0, std::ceil(2.0 / beta)));
  auto q = static_cast<std::int64_t>(std::floor(beta * static_cast<double>(m)));
  q = std::max<std::int64_t>(q, 1);
  q = std::min(q, m - 1);
  return {m, q};
}

}  // namespace pwband
