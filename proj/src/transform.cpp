#include "sip/transform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sip/numerics.hpp"
#include "sip/splines.hpp"

namespace sip::transform {

Eigen::VectorXd TransformSpec::apply(const Eigen::VectorXd& x_raw) const {
    if (x_raw.size() != d) throw std::invalid_argument("TransformSpec: dimension mismatch");
    return (x_raw - center).cwiseQuotient(scale);
}

std::tuple<Eigen::MatrixXd, Eigen::VectorXd, Eigen::VectorXd>
standardize(const Eigen::MatrixXd& X) {
    const Eigen::Index n = X.rows(), d = X.cols();
    if (n < 2) throw std::invalid_argument("standardize: need at least 2 rows");
    Eigen::VectorXd center(d), scale(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const double mean = X.col(j).mean();
        const double ss = (X.col(j).array() - mean).square().sum();
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (!(sd > 0.0))
            throw std::invalid_argument("standardize: column " + std::to_string(j + 1) +
                                        " is constant");
        center(j) = mean;
        scale(j) = sd;
    }
    Eigen::MatrixXd Xs = (X.rowwise() - center.transpose()).array().rowwise() /
                         scale.transpose().array();
    return {Xs, center, scale};
}

double select_radius(const Eigen::MatrixXd& X_std, double quantile) {
    const Eigen::Index n = X_std.rows();
    if (n < 1) throw std::invalid_argument("select_radius: empty matrix");
    if (!(quantile > 0.0 && quantile <= 1.0))
        throw std::invalid_argument("select_radius: quantile must lie in (0,1]");
    std::vector<double> norms(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) norms[static_cast<std::size_t>(i)] = X_std.row(i).norm();
    std::sort(norms.begin(), norms.end());
    // Nearest rank: the ceil(q*n)-th smallest.
    const auto rank = static_cast<std::size_t>(
        std::max<long long>(1, static_cast<long long>(std::ceil(quantile * static_cast<double>(n)))));
    const double a = norms[std::min(rank, norms.size()) - 1];
    if (!(a > 0.0)) throw std::runtime_error("select_radius: all row norms are zero");
    return a;
}

double fd_cdf(double v, int d, double a) {
    if (d < 1) throw std::invalid_argument("fd_cdf: d must be >= 1");
    if (!(a > 0.0)) throw std::invalid_argument("fd_cdf: a must be positive");
    const double clamped = std::clamp(v, -a, a);
    const double x = 0.5 * (1.0 + clamped / a);
    const double shape = 0.5 * (d + 1);
    return numerics::reg_inc_beta(x, shape, shape);
}

double fd_pdf(double v, int d, double a) {
    if (d < 1) throw std::invalid_argument("fd_pdf: d must be >= 1");
    if (!(a > 0.0)) throw std::invalid_argument("fd_pdf: a must be positive");
    if (std::fabs(v) > a) return 0.0;
    const double logc = std::lgamma(d + 1.0) - 2.0 * std::lgamma(0.5 * (d + 1)) -
                        d * std::log(2.0) - std::log(a);
    const double base = 1.0 - (v / a) * (v / a);
    if (base <= 0.0) return d == 1 ? std::exp(logc) : 0.0;
    return std::exp(logc + 0.5 * (d - 1) * std::log(base));
}

Eigen::VectorXd project_index(const Eigen::MatrixXd& X_std, const Eigen::VectorXd& theta) {
    if (X_std.cols() != theta.size())
        throw std::invalid_argument("project_index: dimension mismatch");
    return X_std * theta;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd>
detrend_quadratic_spline(const Eigen::VectorXd& series, int interior_knots) {
    const Eigen::Index T = series.size();
    if (T < interior_knots + 3)
        throw std::invalid_argument("detrend_quadratic_spline: series too short for knot count");
    Eigen::VectorXd time(T);
    for (Eigen::Index i = 0; i < T; ++i)
        time(i) = T > 1 ? static_cast<double>(i) / static_cast<double>(T - 1) : 0.0;
    const splines::SplineBasisSpec spec(3, interior_knots);
    const splines::SplineFit fit = splines::fit_ls_spline(time, series, spec);
    Eigen::VectorXd trend(T);
    for (Eigen::Index i = 0; i < T; ++i) trend(i) = splines::eval_spline(fit, time(i));
    return {series - trend, trend};
}

}  // namespace sip::transform
