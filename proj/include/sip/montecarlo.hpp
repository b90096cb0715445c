#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

#include "sip/dataset.hpp"
#include "sip/estimator.hpp"

namespace sip::montecarlo {

/// Replication summary: per-replication estimates against the generator's
/// true coefficient, with BIAS/SD/MSE per coordinate.
struct McReport {
    Eigen::MatrixXd theta_hats;    // R x d, one row per successful replication
    Eigen::VectorXd theta_true;    // d
    Eigen::VectorXd bias;          // d
    Eigen::VectorXd sd;            // d, sample sd (n-1 normalizer)
    Eigen::VectorXd mse;           // d, mean squared error
    double average_mse = 0.0;
    int replications = 0;
    int failures = 0;
    std::uint64_t seed = 0;
};

/// Which simulated design a replication run draws from.
struct GeneratorSpec {
    int example = 1;       // 1 or 2
    int n = 100;
    int d = 2;             // example 2 only
    int delta = 0;         // example 1 only
    double sigma0 = 0.3;
};

/// Example 1: X bivariate standard normal rejection-sampled into
/// [-2.5,2.5]^2, Y = x1 + x2 + 4exp{-(x1+x2)^2} + delta*sqrt(x1^2+x2^2) + sigma0*eps.
Dataset gen_example1(int n, int delta, double sigma0, std::uint64_t seed);

/// Example 1 mean function.
double example1_mean(double x1, double x2, int delta);

/// Example 2: X iid standard normal n x d,
/// Y = sin(pi/4 X^T theta0) + sigma(X)*eps with
/// sigma(X) = sigma0 (5 - exp(||X||/sqrt(d))) / (5 + exp(||X||/sqrt(d))),
/// theta0 = (1,1,0,...,0,1)/sqrt(3).
Dataset gen_example2(int n, int d, double sigma0, std::uint64_t seed);

Eigen::VectorXd example1_theta0();
Eigen::VectorXd example2_theta0(int d);
Eigen::VectorXd generator_theta0(const GeneratorSpec& spec);
Dataset generate(const GeneratorSpec& spec, std::uint64_t seed);

/// Fits fit_sip on R replications (seeds seed0 + r) and aggregates
/// BIAS/SD/MSE per coordinate.  Failed replications are excluded and counted.
McReport run_replications(const GeneratorSpec& spec, int R, const estimator::FitConfig& config,
                          std::uint64_t seed0);

/// One-step-ahead rolling forecast: fit on rows [0, split), then predict
/// each later row from its observed predictors.  Returns the per-row
/// predictions over the holdout and the mean squared prediction error.
std::pair<Eigen::VectorXd, double>
rolling_forecast(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int split,
                 const estimator::FitConfig& config);

/// Linear least-squares baseline (intercept included) under the same
/// rolling protocol, for head-to-head forecast comparisons.
std::pair<Eigen::VectorXd, double>
rolling_forecast_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int split);

/// Raw series of the synthetic index-autoregressive benchmark:
/// Y_t = G(w_t^T theta0) + noise, w_t = (Y_{t-1}, Y_{t-2}, X_t, Z_t), with a
/// bump-shaped nonlinear G and AR(1) exogenous inputs X, Z.
struct IndexArSeries {
    Eigen::VectorXd y, x, z;
};
IndexArSeries gen_index_ar_series(int n, std::uint64_t seed);

/// The benchmark's aligned design (columns y_lag1, y_lag2, x_lag0, z_lag0)
/// and response.
Dataset gen_index_ar(int n, std::uint64_t seed);

}  // namespace sip::montecarlo
