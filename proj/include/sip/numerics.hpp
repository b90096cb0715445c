#pragma once

#include <Eigen/Core>
#include <functional>

namespace sip::numerics {

/// Symmetric positive definite normal-equations system gram * w = rhs.
/// ridge >= 0 is added to the diagonal before factorization.
struct SpdSystem {
    Eigen::MatrixXd gram;
    Eigen::VectorXd rhs;
    double ridge = 0.0;
};

/// Regularized incomplete beta function I_x(alpha, beta).
///
/// Continued fraction (modified Lentz) with the symmetry switch at
/// x > (alpha+1)/(alpha+beta+2); tolerance 1e-14, at most 300 iterations.
/// Throws std::invalid_argument for x outside [0,1] or nonpositive shapes.
double reg_inc_beta(double x, double alpha, double beta);

/// Solves (gram + ridge*I) w = rhs by Cholesky factorization.
///
/// If the factorization fails, a fallback ridge of 1e-8*trace(gram)/m is
/// added and the solve is retried once; a second failure throws
/// std::runtime_error. Validates that gram is symmetric to 1e-12 relative.
Eigen::VectorXd solve_spd(const SpdSystem& system);

/// Central-difference gradient of f at x with the given step.
/// Throws std::runtime_error if f evaluates to a non-finite value.
Eigen::VectorXd central_diff_grad(const std::function<double(const Eigen::VectorXd&)>& f,
                                  const Eigen::VectorXd& x, double step);

/// Same with the default step 1e-5 * max(1, ||x||_inf).
Eigen::VectorXd central_diff_grad(const std::function<double(const Eigen::VectorXd&)>& f,
                                  const Eigen::VectorXd& x);

/// Symmetrized central-difference Hessian of f at x: (H + H^T)/2.
Eigen::MatrixXd central_diff_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                                     const Eigen::VectorXd& x, double step);

}  // namespace sip::numerics
