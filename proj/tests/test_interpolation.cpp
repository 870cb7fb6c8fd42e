#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "interpolation.hpp"
#include "kernel.hpp"
#include "rng.hpp"
#include "types.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <vector>

using namespace pwband;

namespace {

const KernelParams kDefault{30.0};

std::vector<double> distinct_uniform(CounterRng& rng, int n) {
  for (;;) {
    std::vector<double> xs;
    for (int i = 0; i < n; ++i) xs.push_back(rng.uniform01());
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (std::fabs(xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)]) < 1e-4) {
          ok = false;
          break;
        }
      }
    }
    if (ok) return xs;
  }
}

}  // namespace

TEST_CASE("zero observations give the zero interpolant") {
  std::vector<double> xs = {0.2, 0.5, 0.8};
  std::vector<double> ys = {0.0, 0.0, 0.0};
  Interpolant f = min_norm_interpolant(xs, ys, kDefault);
  CHECK(f.coefficients.norm() == 0.0);
  CHECK(evaluate(f, 0.33) == 0.0);
  CHECK(norm_sq(f) == 0.0);
}

// [DERIVED] K = [eta/pi], y = 1 => alpha = pi/eta.
TEST_CASE("single observation inverts the diagonal") {
  std::vector<double> xs = {0.5};
  std::vector<double> ys = {1.0};
  Interpolant f = min_norm_interpolant(xs, ys, kDefault);
  REQUIRE(f.coefficients.size() == 1);
  CHECK(f.coefficients[0] == doctest::Approx(std::numbers::pi / 30.0).epsilon(1e-14));
  CHECK(evaluate(f, 0.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(norm_sq(f) == doctest::Approx(std::numbers::pi / 30.0).epsilon(1e-13));
}

TEST_CASE("interpolant reproduces observations") {
  CounterRng rng(101, 0, kStreamInputs);
  std::vector<double> xs = distinct_uniform(rng, 8);
  std::vector<double> ys;
  for (int i = 0; i < 8; ++i) ys.push_back(rng.uniform(-1.0, 1.0));
  Interpolant f = min_norm_interpolant(xs, ys, kDefault);
  for (int i = 0; i < 8; ++i) {
    CHECK(std::fabs(evaluate(f, xs[static_cast<std::size_t>(i)]) -
                    ys[static_cast<std::size_t>(i)]) <= 1e-8);
  }
}

// [DERIVED] two-point evaluation as an explicit hand-expanded sum.
TEST_CASE("midpoint value matches the hand-written expansion") {
  std::vector<double> xs = {0.2, 0.6};
  std::vector<double> ys = {0.7, -0.4};
  Interpolant f = min_norm_interpolant(xs, ys, kDefault);
  double x = 0.4;
  double expect = f.coefficients[0] * kernel_eval(x, 0.2, kDefault) +
                  f.coefficients[1] * kernel_eval(x, 0.6, kDefault);
  CHECK(evaluate(f, x) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("squared norm equals the quadratic form in the data") {
  CounterRng rng(103, 0, kStreamInputs);
  std::vector<double> xs = distinct_uniform(rng, 6);
  Eigen::VectorXd y(6);
  for (int i = 0; i < 6; ++i) y[i] = rng.uniform(-1.0, 1.0);
  std::vector<double> ys(y.data(), y.data() + 6);
  Interpolant f = min_norm_interpolant(xs, ys, kDefault);
  GramMatrix g = gram(xs, kDefault);
  double via_solve = y.dot(solve_spd(g, y));
  CHECK(norm_sq(f) == doctest::Approx(via_solve).epsilon(1e-8));
  CHECK(norm_sq(f) >= 0.0);
}

TEST_CASE("norm minimality: the interpolant is orthogonal to interpolating perturbations") {
  // Any g with g(x_k) = 0 for all k that lives in the span of a larger
  // center set satisfies <f, g> = 0, so ||f + g||^2 >= ||f||^2.
  CounterRng rng(107, 0, kStreamInputs);
  int passes = 0;
  for (int inst = 0; inst < 100; ++inst) {
    std::vector<double> xs = distinct_uniform(rng, 5);
    std::vector<double> ys;
    for (int i = 0; i < 5; ++i) ys.push_back(rng.uniform(-1.0, 1.0));
    std::vector<double> centers = xs;
    std::vector<double> extra = distinct_uniform(rng, 3);
    bool clash = false;
    for (double e : extra) {
      for (double x : xs) {
        if (std::fabs(e - x) < 1e-4) clash = true;
      }
    }
    if (clash) continue;
    centers.insert(centers.end(), extra.begin(), extra.end());

    GramMatrix big = gram(centers, kDefault);
    // Rows of E pick out the observed inputs; null space of E*Kbig gives
    // coefficients of functions vanishing on xs.
    Eigen::MatrixXd eval_rows(5, 8);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 8; ++j) {
        eval_rows(i, j) = kernel_eval(xs[static_cast<std::size_t>(i)],
                                      centers[static_cast<std::size_t>(j)], kDefault);
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(eval_rows);
    Eigen::MatrixXd null_basis = lu.kernel();
    if (null_basis.cols() == 0) continue;

    Interpolant f = min_norm_interpolant(xs, ys, kDefault);
    double base = norm_sq(f);
    Eigen::VectorXd f_ext = Eigen::VectorXd::Zero(8);
    f_ext.head(5) = f.coefficients;
    for (int c = 0; c < null_basis.cols(); ++c) {
      Eigen::VectorXd g_coeff = null_basis.col(c);
      for (double t : {-1.0, 0.5, 2.0}) {
        Eigen::VectorXd cand = f_ext + t * g_coeff;
        double cand_norm = cand.dot(big.entries * cand);
        CHECK(cand_norm >= base - 1e-10);
      }
    }
    ++passes;
  }
  CHECK(passes >= 80);
}

TEST_CASE("interpolant scales linearly with the data") {
  CounterRng rng(109, 0, kStreamInputs);
  std::vector<double> xs = distinct_uniform(rng, 5);
  std::vector<double> ys, ys2;
  for (int i = 0; i < 5; ++i) {
    double v = rng.uniform(-1.0, 1.0);
    ys.push_back(v);
    ys2.push_back(3.0 * v);
  }
  Interpolant f = min_norm_interpolant(xs, ys, kDefault);
  Interpolant g = min_norm_interpolant(xs, ys2, kDefault);
  for (int i = 0; i < 5; ++i) {
    CHECK(g.coefficients[i] == doctest::Approx(3.0 * f.coefficients[i]).epsilon(1e-12));
  }
  CHECK(norm_sq(g) == doctest::Approx(9.0 * norm_sq(f)).epsilon(1e-10));
}

TEST_CASE("re-interpolating the interpolant is idempotent") {
  CounterRng rng(113, 0, kStreamInputs);
  std::vector<double> xs = distinct_uniform(rng, 6);
  std::vector<double> ys;
  for (int i = 0; i < 6; ++i) ys.push_back(rng.uniform(-1.0, 1.0));
  Interpolant f = min_norm_interpolant(xs, ys, kDefault);
  std::vector<double> ys_f;
  for (double x : xs) ys_f.push_back(evaluate(f, x));
  Interpolant g = min_norm_interpolant(xs, ys_f, kDefault);
  for (int i = 0; i < 6; ++i) {
    CHECK(std::fabs(f.coefficients[i] - g.coefficients[i]) <= 1e-8);
  }
}

TEST_CASE("mismatched input sizes are rejected") {
  std::vector<double> xs = {0.1, 0.2};
  std::vector<double> ys = {1.0};
  CHECK_THROWS_AS(min_norm_interpolant(xs, ys, kDefault), error);
}

TEST_CASE("empty data is rejected") {
  std::vector<double> none;
  CHECK_THROWS_AS(min_norm_interpolant(none, none, kDefault), error);
}
