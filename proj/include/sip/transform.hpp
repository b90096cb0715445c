#pragma once

#include <Eigen/Core>
#include <tuple>

namespace sip::transform {

/// Predictor-side transform parameters: per-coordinate standardization
/// (center, scale) plus the index radius a used by the CDF map.
struct TransformSpec {
    int d = 0;
    double a = 0.0;
    Eigen::VectorXd center;
    Eigen::VectorXd scale;

    /// Applies the stored center/scale to a raw predictor row.
    Eigen::VectorXd apply(const Eigen::VectorXd& x_raw) const;
};

/// Z-scores each column (mean 0, sample sd 1 with the n-1 normalizer).
/// Throws std::invalid_argument naming the column if one is constant.
std::tuple<Eigen::MatrixXd, Eigen::VectorXd, Eigen::VectorXd>
standardize(const Eigen::MatrixXd& X);

/// Nearest-rank empirical quantile of the row Euclidean norms.
/// Throws std::runtime_error if the result is zero.
double select_radius(const Eigen::MatrixXd& X_std, double quantile);

/// Rescaled centered Beta((d+1)/2,(d+1)/2) CDF on [-a,a]; v is clamped
/// to [-a,a] first, so the result is always in [0,1].
double fd_cdf(double v, int d, double a);

/// Density of fd_cdf: proportional to (1 - v^2/a^2)^((d-1)/2) on [-a,a],
/// zero outside.
double fd_pdf(double v, int d, double a);

/// X_std * theta.
Eigen::VectorXd project_index(const Eigen::MatrixXd& X_std, const Eigen::VectorXd& theta);

/// Least-squares quadratic (order-3) spline trend of a series on time
/// rescaled to [0,1].  Returns (detrended, trend) with series = detrended + trend.
std::pair<Eigen::VectorXd, Eigen::VectorXd>
detrend_quadratic_spline(const Eigen::VectorXd& series, int interior_knots = 3);

}  // namespace sip::transform
