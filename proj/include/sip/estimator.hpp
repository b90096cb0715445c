#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "sip/dataset.hpp"
#include "sip/splines.hpp"
#include "sip/transform.hpp"

namespace sip::estimator {

/// Unit vector on the upper hemisphere: ||theta|| = 1 with theta_d > 0.
/// The free parametrization is the first d-1 coordinates; the last one is
/// recovered as sqrt(1 - ||free||^2).
struct HemisphereVector {
    Eigen::VectorXd theta;

    /// Builds theta from its free part; requires ||free|| < 1.
    static HemisphereVector from_free(const Eigen::VectorXd& free_part);

    /// Normalizes an arbitrary nonzero vector and flips the sign so the
    /// last coordinate is positive.
    static HemisphereVector from_direction(const Eigen::VectorXd& direction);

    Eigen::VectorXd free_part() const { return theta.head(theta.size() - 1); }
    double last() const { return theta(theta.size() - 1); }
    Eigen::Index dim() const { return theta.size(); }
};

enum class InitKind { ols, last_axis, explicit_vector };

struct FitConfig {
    int c1 = 1;
    int c2 = 5;
    double cap_c = 0.995;
    double radius_quantile = 0.95;
    double grad_tol = 1e-8;
    int max_iter = 200;
    InitKind init = InitKind::ols;
    Eigen::VectorXd init_vector;  // used when init == explicit_vector
};

/// Result of the full fit.  theta_hat is expressed in the original
/// (unstandardized) predictor coordinates; theta_std is the equivalent
/// direction in standardized coordinates and is what predict() uses
/// together with the stored transform.
struct SipFit {
    HemisphereVector theta_hat;
    HemisphereVector theta_std;
    transform::TransformSpec transform;
    splines::SplineFit link;
    double risk = 0.0;
    Eigen::Index n = 0;
    Eigen::Index d = 0;
    int iterations = 0;
    bool converged = false;
    std::vector<std::string> columns;
};

struct MinimizeResult {
    HemisphereVector theta;
    int iterations = 0;
    bool converged = false;
};

/// Empirical risk: transform the index through fd_cdf, profile out the
/// spline link by least squares, return mean squared residual.
double empirical_risk(const Dataset& data_std, const HemisphereVector& theta,
                      const splines::SplineBasisSpec& spec,
                      const transform::TransformSpec& transform);

/// Analytic score (gradient of the profiled risk with respect to the free
/// part of theta).  Matches central finite differences of empirical_risk
/// away from clamp boundaries and knot images.
Eigen::VectorXd score(const Dataset& data_std, const HemisphereVector& theta,
                      const splines::SplineBasisSpec& spec,
                      const transform::TransformSpec& transform);

/// Quasi-Newton minimization of the profiled risk over the free part,
/// with Armijo backtracking and projection onto ||free|| <= cap_c.
MinimizeResult minimize_risk(const Dataset& data_std, const splines::SplineBasisSpec& spec,
                             const transform::TransformSpec& transform, const FitConfig& config);

/// Full pipeline: standardize, select radius, knot rule, minimize, refit link.
SipFit fit_sip(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const FitConfig& config,
               const std::vector<std::string>& columns = {});

/// Prediction at a raw predictor row: standardize, project, clamp, CDF-map,
/// evaluate the link spline.
double predict(const SipFit& fit, const Eigen::VectorXd& x_raw);

/// The estimated link g over an equally spaced grid of index values on [-a, a].
std::vector<std::pair<double, double>> link_curve(const SipFit& fit, int grid_size);

/// Risk profiled in the free parameter (standardized data), used by the
/// optimizer, the finite-difference oracles and the inference module.
double risk_at_free(const Dataset& data_std, const Eigen::VectorXd& free_part,
                    const splines::SplineBasisSpec& spec,
                    const transform::TransformSpec& transform);

}  // namespace sip::estimator
