#include "sip/inference.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sip/numerics.hpp"
#include "sip/splines.hpp"
#include "sip/transform.hpp"

namespace sip::inference {

namespace {

Dataset standardized(const Dataset& data, const estimator::SipFit& fit) {
    Dataset out;
    out.y = data.y;
    out.columns = data.columns;
    out.X.resize(data.X.rows(), data.X.cols());
    for (Eigen::Index i = 0; i < data.X.rows(); ++i)
        out.X.row(i) = fit.transform.apply(data.X.row(i).transpose()).transpose();
    return out;
}

// Profile link values gamma_theta(U_theta,i) for an arbitrary (not
// necessarily unit) theta; the spline is refit at that theta.
Eigen::VectorXd profile_values(const Dataset& std_data, const Eigen::VectorXd& theta,
                               const estimator::SipFit& fit) {
    const Eigen::Index n = std_data.n();
    const int d = static_cast<int>(std_data.d());
    const Eigen::VectorXd index = std_data.X * theta;
    Eigen::VectorXd u(n);
    for (Eigen::Index i = 0; i < n; ++i)
        u(i) = transform::fd_cdf(index(i), d, fit.transform.a);
    const splines::SplineFit refit = splines::fit_ls_spline(u, std_data.y, fit.link.spec);
    Eigen::VectorXd values(n);
    for (Eigen::Index i = 0; i < n; ++i) values(i) = splines::eval_spline(refit, u(i));
    return values;
}

}  // namespace

Eigen::MatrixXd hessian_rstar(const Dataset& data, const estimator::SipFit& fit, double step) {
    const Dataset std_data = standardized(data, fit);
    const Eigen::VectorXd free_hat = fit.theta_std.free_part();
    auto f = [&](const Eigen::VectorXd& free_part) {
        return estimator::risk_at_free(std_data, free_part, fit.link.spec, fit.transform);
    };
    return numerics::central_diff_hessian(f, free_hat, step);
}

Eigen::MatrixXd psi_hat(const Dataset& data, const estimator::SipFit& fit, double step) {
    const Dataset std_data = standardized(data, fit);
    const Eigen::Index n = std_data.n();
    const Eigen::Index d = std_data.d();
    const Eigen::VectorXd theta = fit.theta_std.theta;

    // Residual factor gamma_hat(U_i) - Y_i at the fitted theta.
    const Eigen::VectorXd fitted = profile_values(std_data, theta, fit);
    const Eigen::VectorXd resid_factor = fitted - std_data.y;

    // d/dtheta_p of gamma_theta(U_theta,i) by central differences in the
    // full coordinates (the sphere constraint enters through eta below).
    Eigen::MatrixXd gdot(n, d);
    for (Eigen::Index p = 0; p < d; ++p) {
        Eigen::VectorXd tp = theta, tm = theta;
        tp(p) += step;
        tm(p) -= step;
        gdot.col(p) =
            (profile_values(std_data, tp, fit) - profile_values(std_data, tm, fit)) / (2.0 * step);
    }

    const double theta_d = theta(d - 1);
    Eigen::MatrixXd eta(n, d - 1);
    for (Eigen::Index p = 0; p < d - 1; ++p)
        eta.col(p) = 2.0 *
                     (gdot.col(p) - (theta(p) / theta_d) * gdot.col(d - 1)).cwiseProduct(
                         resid_factor);
    Eigen::MatrixXd psi = eta.transpose() * eta / static_cast<double>(n);
    psi = 0.5 * (psi + psi.transpose()).eval();
    return psi;
}

CovarianceEstimate covariance(const Dataset& data, const estimator::SipFit& fit) {
    CovarianceEstimate est;
    est.hessian = hessian_rstar(data, fit);
    est.meat = psi_hat(data, fit);

    const Eigen::Index m = est.hessian.rows();
    if (m == 0) {
        est.sandwich.resize(0, 0);
        est.se.resize(0);
        return est;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(est.hessian);
    const Eigen::VectorXd ev = eig.eigenvalues();
    const double max_abs = ev.cwiseAbs().maxCoeff();
    if (!(max_abs > 0.0) || ev.cwiseAbs().minCoeff() <= 1e-12 * max_abs) {
        std::ostringstream msg;
        msg << "covariance: singular Hessian, eigenvalues:";
        for (Eigen::Index i = 0; i < m; ++i) msg << ' ' << ev(i);
        throw std::runtime_error(msg.str());
    }
    const Eigen::MatrixXd hinv =
        eig.eigenvectors() * ev.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
    est.sandwich = hinv * est.meat * hinv;
    est.sandwich = 0.5 * (est.sandwich + est.sandwich.transpose()).eval();
    est.se = (est.sandwich.diagonal() / static_cast<double>(data.n())).cwiseMax(0.0).cwiseSqrt();
    return est;
}

}  // namespace sip::inference
