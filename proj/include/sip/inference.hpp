#pragma once

#include <Eigen/Core>

#include "sip/dataset.hpp"
#include "sip/estimator.hpp"

namespace sip::inference {

/// Plug-in sandwich covariance for the free part of theta_hat:
/// sandwich = H^{-1} Psi H^{-1}, se_p = sqrt(sandwich_pp / n).
struct CovarianceEstimate {
    Eigen::MatrixXd hessian;
    Eigen::MatrixXd meat;
    Eigen::MatrixXd sandwich;
    Eigen::VectorXd se;
};

/// Symmetrized central-difference Hessian of the profiled risk at the
/// fitted free parameter (step 1e-4 on the sphere parametrization).
/// data holds the raw training rows; fit.transform is reapplied to them.
Eigen::MatrixXd hessian_rstar(const Dataset& data, const estimator::SipFit& fit,
                              double step = 1e-4);

/// Empirical outer-product matrix Psi_hat = n^{-1} sum eta_i eta_i^T with
/// eta_{i,p} = 2 {gdot_p - theta_p/theta_d gdot_d}(U_i) {ghat(U_i) - Y_i};
/// the profile-link derivatives gdot are central finite differences of the
/// spline refit under coordinate perturbations of theta.
Eigen::MatrixXd psi_hat(const Dataset& data, const estimator::SipFit& fit,
                        double step = 1e-4);

/// Assembles the sandwich.  Throws std::runtime_error (reporting the
/// eigenvalues) if the Hessian is singular.
CovarianceEstimate covariance(const Dataset& data, const estimator::SipFit& fit);

}  // namespace sip::inference
