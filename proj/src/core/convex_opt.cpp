#include "convex_opt.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <vector>

namespace pwband {

namespace {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// sup_x [objective - lambda * constraint](x) for lambda with PD Hessian
// H = lambda*Ac - Ao; nullopt when H is numerically not PD.
std::optional<double> dual_value(double lambda, const Eigen::MatrixXd& ao,
                                 const Eigen::VectorXd& bo, double co,
                                 const Eigen::MatrixXd& ac, const Eigen::VectorXd& bc,
                                 double cc) {
  Eigen::MatrixXd h = lambda * ac - ao;
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Eigen::VectorXd u = bo - lambda * bc;
  double v = (co - lambda * cc) + u.dot(llt.solve(u));
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

double qcqp_max(const QuadraticForm& objective, const QuadraticForm& constraint) {
  const Eigen::MatrixXd ao = symmetrized(objective.matrix);
  const Eigen::MatrixXd ac = symmetrized(constraint.matrix);
  const Eigen::VectorXd& bo = objective.linear;
  const Eigen::VectorXd& bc = constraint.linear;
  const double co = objective.constant;
  const double cc = constraint.constant;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esc(ac);
  if (esc.info() != Eigen::Success) {
    throw error(errc::ill_conditioned, "constraint eigendecomposition failed");
  }
  double lc_min = esc.eigenvalues().minCoeff();
  double lc_max = esc.eigenvalues().maxCoeff();
  // Dual domain {lambda >= 0 : lambda*Ac >= Ao} is empty unless Ac is PD.
  if (!(lc_max > 0.0) || lc_min <= 1e-12 * lc_max) return kInf;

  Eigen::LLT<Eigen::MatrixXd> ao_llt(ao);
  if (ao_llt.info() != Eigen::Success) {
    throw error(errc::invalid_argument, "objective matrix must be positive definite");
  }
  Eigen::VectorXd center = -ao_llt.solve(bo);
  if (!(constraint.eval(center) < 0.0)) {
    throw error(errc::no_strictly_feasible_point,
                "constraint is not strictly satisfied at the objective center");
  }

  // lambda_lo = largest generalized eigenvalue of (Ao, Ac).
  Eigen::LLT<Eigen::MatrixXd> ac_llt(ac);
  if (ac_llt.info() != Eigen::Success) return kInf;
  Eigen::MatrixXd l = ac_llt.matrixL();
  Eigen::MatrixXd b = l.triangularView<Eigen::Lower>().solve(ao);
  b = l.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd(b.transpose())).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esb(symmetrized(b));
  double lambda_lo = std::max(esb.eigenvalues().maxCoeff(), 0.0);

  auto g = [&](double lambda) {
    auto v = dual_value(lambda, ao, bo, co, ac, bc, cc);
    return v ? *v : kInf;
  };

  // Bracket the dual minimum by doubling the offset past lambda_lo. The dual
  // is +inf-valued at the left edge and eventually increases (Slater), so a
  // finite interior minimum is always bracketed.
  const double unit = std::max(lambda_lo, 1.0);
  double t_prev = lambda_lo + unit * 1e-8;
  double g_prev = g(t_prev);
  double best = g_prev;
  double t_curr = t_prev;
  double g_curr = g_prev;
  for (;;) {
    double t_next = lambda_lo + 2.0 * (t_curr - lambda_lo);
    if (t_next - lambda_lo > 1e14 * unit) return kInf;
    double g_next = g(t_next);
    best = std::min(best, g_next);
    if (std::isfinite(g_curr) && g_next > g_curr) {
      t_curr = t_next;
      break;
    }
    t_prev = t_curr;
    g_prev = g_curr;
    t_curr = t_next;
    g_curr = g_next;
  }

  // Golden-section minimization of the convex dual over [t_prev, t_curr].
  const double gr = 0.6180339887498949;
  double a = t_prev;
  double bnd = t_curr;
  double x1 = bnd - gr * (bnd - a);
  double x2 = a + gr * (bnd - a);
  double f1 = g(x1);
  double f2 = g(x2);
  while (bnd - a > 1e-10 * std::max(1.0, bnd)) {
    best = std::min({best, f1, f2});
    if (f1 <= f2) {
      bnd = x2;
      x2 = x1;
      f2 = f1;
      x1 = bnd - gr * (bnd - a);
      f1 = g(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (bnd - a);
      f2 = g(x2);
    }
  }
  return std::min({best, f1, f2});
}

namespace {

struct ReducedProblem {
  Eigen::MatrixXd m;
  Eigen::VectorXd l;
  double c = 0.0;
  Eigen::VectorXd lo, hi;
  std::vector<Eigen::Index> free_idx;
};

ReducedProblem reduce(const QuadraticForm& quad, const BoxBounds& box,
                      std::span<const PinnedCoordinate> pinned) {
  const Eigen::Index d = quad.matrix.rows();
  if (quad.linear.size() != d || box.lower.size() != d || box.upper.size() != d) {
    throw error(errc::invalid_argument, "box quadratic dimension mismatch");
  }
  std::vector<char> is_pinned(static_cast<std::size_t>(d), 0);
  Eigen::VectorXd pin_val = Eigen::VectorXd::Zero(d);
  for (const auto& p : pinned) {
    if (p.index < 0 || p.index >= d) {
      throw error(errc::invalid_argument, "pinned coordinate out of range");
    }
    is_pinned[static_cast<std::size_t>(p.index)] = 1;
    pin_val[p.index] = p.value;
  }
  ReducedProblem r;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!is_pinned[static_cast<std::size_t>(i)]) r.free_idx.push_back(i);
  }
  const auto f = static_cast<Eigen::Index>(r.free_idx.size());
  r.m.resize(f, f);
  r.l.resize(f);
  r.lo.resize(f);
  r.hi.resize(f);
  for (Eigen::Index a = 0; a < f; ++a) {
    Eigen::Index ia = r.free_idx[static_cast<std::size_t>(a)];
    r.lo[a] = box.lower[ia];
    r.hi[a] = box.upper[ia];
    if (r.lo[a] > r.hi[a]) {
      throw error(errc::invalid_argument, "box has lower bound above upper bound");
    }
    double cross = quad.linear[ia];
    for (Eigen::Index j = 0; j < d; ++j) {
      if (is_pinned[static_cast<std::size_t>(j)]) cross += quad.matrix(ia, j) * pin_val[j];
    }
    r.l[a] = cross;
    for (Eigen::Index bcol = 0; bcol < f; ++bcol) {
      r.m(a, bcol) = quad.matrix(ia, r.free_idx[static_cast<std::size_t>(bcol)]);
    }
  }
  r.c = quad.constant;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!is_pinned[static_cast<std::size_t>(j)]) continue;
    r.c += 2.0 * quad.linear[j] * pin_val[j];
    for (Eigen::Index k = 0; k < d; ++k) {
      if (is_pinned[static_cast<std::size_t>(k)]) r.c += pin_val[j] * quad.matrix(j, k) * pin_val[k];
    }
  }
  return r;
}

}  // namespace

BoxMinimum min_quad_over_box(const QuadraticForm& quad, const BoxBounds& box,
                             std::span<const PinnedCoordinate> pinned,
                             const Eigen::VectorXd* warm_start) {
  ReducedProblem r = reduce(quad, box, pinned);
  const auto f = static_cast<Eigen::Index>(r.free_idx.size());
  const Eigen::Index d = quad.matrix.rows();

  Eigen::VectorXd full = Eigen::VectorXd::Zero(d);
  for (const auto& p : pinned) full[p.index] = p.value;

  auto qval = [&](const Eigen::VectorXd& z) { return z.dot(r.m * z) + 2.0 * r.l.dot(z) + r.c; };
  auto clamp = [&](Eigen::VectorXd z) {
    for (Eigen::Index i = 0; i < f; ++i) z[i] = std::min(std::max(z[i], r.lo[i]), r.hi[i]);
    return z;
  };

  Eigen::VectorXd z(f);
  if (warm_start && warm_start->size() == d) {
    for (Eigen::Index i = 0; i < f; ++i) z[i] = (*warm_start)[r.free_idx[static_cast<std::size_t>(i)]];
    z = clamp(std::move(z));
  } else {
    z = clamp(Eigen::VectorXd::Zero(f));
  }

  const double kkt_tol = 1e-8;
  const long cap = 10 * std::max<long>(1, static_cast<long>(f) * static_cast<long>(f));
  for (long it = 0; it < cap && f > 0; ++it) {
    Eigen::VectorXd grad = 2.0 * (r.m * z + r.l);
    double kkt = 0.0;
    std::vector<Eigen::Index> work;
    work.reserve(static_cast<std::size_t>(f));
    for (Eigen::Index i = 0; i < f; ++i) {
      bool at_lo = z[i] <= r.lo[i];
      bool at_hi = z[i] >= r.hi[i];
      double resid = grad[i];
      if (at_lo && resid > 0.0) resid = 0.0;
      if (at_hi && resid < 0.0) resid = 0.0;
      kkt = std::max(kkt, std::fabs(resid));
      if (!((at_lo && grad[i] > 0.0) || (at_hi && grad[i] < 0.0))) work.push_back(i);
    }
    if (kkt <= kkt_tol) break;
    if (work.empty()) break;

    const auto w = static_cast<Eigen::Index>(work.size());
    Eigen::MatrixXd mw(w, w);
    Eigen::VectorXd rhs(w);
    for (Eigen::Index a = 0; a < w; ++a) {
      Eigen::Index ia = work[static_cast<std::size_t>(a)];
      double acc = r.l[ia];
      for (Eigen::Index j = 0; j < f; ++j) {
        bool in_work = std::binary_search(work.begin(), work.end(), j);
        if (!in_work) acc += r.m(ia, j) * z[j];
      }
      rhs[a] = -acc;
      for (Eigen::Index bcol = 0; bcol < w; ++bcol) {
        mw(a, bcol) = r.m(ia, work[static_cast<std::size_t>(bcol)]);
      }
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(mw);
    Eigen::VectorXd target = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !target.allFinite()) break;

    Eigen::VectorXd dz = Eigen::VectorXd::Zero(f);
    for (Eigen::Index a = 0; a < w; ++a) {
      dz[work[static_cast<std::size_t>(a)]] = target[a] - z[work[static_cast<std::size_t>(a)]];
    }
    double q0 = qval(z);
    double t = 1.0;
    Eigen::VectorXd znew = clamp(z + dz);
    while (qval(znew) > q0 + 1e-15 * (1.0 + std::fabs(q0)) && t > 1e-12) {
      t *= 0.5;
      znew = clamp(z + t * dz);
    }
    if ((znew - z).lpNorm<Eigen::Infinity>() == 0.0) break;
    z = std::move(znew);
  }

  BoxMinimum out;
  out.value = qval(z);
  out.argmin = full;
  for (Eigen::Index i = 0; i < f; ++i) out.argmin[r.free_idx[static_cast<std::size_t>(i)]] = z[i];
  return out;
}

std::optional<std::pair<double, double>> linear_extent(const BoxedEllipsoid& problem) {
  const double level = problem.level;
  const double feas_slack = 1e-12;
  const double bisect_tol = 1e-8;
  const Eigen::Index d = problem.quad.matrix.rows();
  if (d < 1) throw error(errc::invalid_argument, "extent needs at least one coordinate");

  BoxMinimum global = min_quad_over_box(problem.quad, problem.box);
  if (!(global.value <= level + feas_slack)) return std::nullopt;

  // Bracket from the unconstrained ellipsoid extent around the quad's minimizer.
  Eigen::LDLT<Eigen::MatrixXd> ldlt(symmetrized(problem.quad.matrix));
  if (ldlt.info() != Eigen::Success) {
    throw error(errc::ill_conditioned, "extent quadratic is not positive definite");
  }
  Eigen::VectorXd zc = -ldlt.solve(problem.quad.linear);
  double qc = problem.quad.eval(zc);
  Eigen::VectorXd e0 = Eigen::VectorXd::Unit(d, 0);
  double minv00 = ldlt.solve(e0)[0];
  double extent = std::sqrt(std::max(level - qc, 0.0) * std::max(minv00, 0.0));

  bool box_active = false;
  for (Eigen::Index i = 1; i < d; ++i) {
    if (std::isfinite(problem.box.lower[i]) || std::isfinite(problem.box.upper[i])) {
      box_active = true;
      break;
    }
  }
  double lo_limit = std::max(zc[0] - extent, problem.box.lower[0]);
  double hi_limit = std::min(zc[0] + extent, problem.box.upper[0]);
  if (!box_active && !std::isfinite(problem.box.lower[0]) &&
      !std::isfinite(problem.box.upper[0])) {
    return std::make_pair(zc[0] - extent, zc[0] + extent);
  }

  Eigen::VectorXd warm = global.argmin;
  auto feasible = [&](double z0) {
    PinnedCoordinate pin{0, z0};
    BoxMinimum m = min_quad_over_box(problem.quad, problem.box, {&pin, 1}, &warm);
    if (m.value <= level + feas_slack) {
      warm = m.argmin;
      return true;
    }
    return false;
  };

  double start = global.argmin[0];
  auto endpoint = [&](double limit) {
    warm = global.argmin;
    if (limit == start) return start;
    if (feasible(limit)) return limit;
    double inside = start;
    double outside = limit;
    while (std::fabs(outside - inside) > bisect_tol) {
      double mid = 0.5 * (inside + outside);
      if (feasible(mid)) {
        inside = mid;
      } else {
        outside = mid;
      }
    }
    return inside;
  };

  double zmax = endpoint(hi_limit);
  double zmin = endpoint(lo_limit);
  return std::make_pair(std::min(zmin, start), std::max(zmax, start));
}

}  // namespace pwband
