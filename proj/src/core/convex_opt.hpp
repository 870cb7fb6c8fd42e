#pragma once

#include "types.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <utility>

namespace pwband {

// q(x) = x' M x + 2 l' x + c.
struct QuadraticForm {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd linear;
  double constant = 0.0;

  double eval(const Eigen::VectorXd& x) const {
    return x.dot(matrix * x) + 2.0 * linear.dot(x) + constant;
  }
};

// sup of a PD-centered quadratic objective over {constraint <= 0}. Returns
// +inf when unbounded. Finite values are S-lemma dual optima and therefore
// never below the true supremum.
double qcqp_max(const QuadraticForm& objective, const QuadraticForm& constraint);

struct BoxBounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct PinnedCoordinate {
  Eigen::Index index;
  double value;
};

struct BoxMinimum {
  double value = 0.0;
  Eigen::VectorXd argmin;
};

// Exact minimum of a convex quadratic over a box (bounds may be +-inf),
// optionally with coordinates pinned to fixed values. Projected Newton on the
// free set, KKT tolerance 1e-8, iteration cap 10 * dim^2.
BoxMinimum min_quad_over_box(const QuadraticForm& quad, const BoxBounds& box,
                             std::span<const PinnedCoordinate> pinned = {},
                             const Eigen::VectorXd* warm_start = nullptr);

// {z : quad(z) <= level} intersected with a box; coordinate 0 is the one
// whose extent is sought.
struct BoxedEllipsoid {
  QuadraticForm quad;
  double level = 0.0;
  BoxBounds box;
};

// inf and sup of z_0 over the boxed ellipsoid; nullopt when the set is empty.
std::optional<std::pair<double, double>> linear_extent(const BoxedEllipsoid& problem);

}  // namespace pwband
