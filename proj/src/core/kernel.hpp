#pragma once

#include "types.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <span>
#include <vector>

namespace pwband {

// Band limit eta in radians per unit input; Fourier support [-eta, eta].
struct KernelParams {
  double eta = 30.0;
};

void validate(const KernelParams& params);

// Paley-Wiener kernel sin(eta(z-s))/(pi(z-s)), eta/pi on the diagonal.
double kernel_eval(double z, double s, const KernelParams& params) noexcept;

struct GramMatrix {
  Eigen::MatrixXd entries;
  std::vector<double> inputs;
};

// Pivot floor for Gram factorizations: 1e-12 * (eta/pi).
double gram_pivot_floor(const KernelParams& params);

// Throws duplicate_inputs on near-coincident inputs, ill_conditioned when the
// factorization check fails. Never adds jitter.
GramMatrix gram(std::span<const double> inputs, const KernelParams& params);

Eigen::VectorXd kernel_vector(std::span<const double> inputs, double x0,
                              const KernelParams& params);

// Symmetric factorization with an explicit pivot floor.
class SpdFactor {
 public:
  SpdFactor(const Eigen::MatrixXd& m, double pivot_floor);
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const { return ldlt_.solve(rhs); }
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const { return ldlt_.solve(rhs); }

 private:
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
};

Eigen::VectorXd solve_spd(const GramMatrix& g, const Eigen::VectorXd& rhs);

// Principal square root with eigenvalues >= -1e-10 * ||M|| clipped to zero;
// throws not_psd below that.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m);

// V diag(1 / max(lambda_i, floor)) V'. Used where a PSD inverse weighting is
// needed without hard-failing on numerically tiny eigenvalues.
Eigen::MatrixXd floored_inverse(const Eigen::MatrixXd& m, double floor);

}  // namespace pwband
