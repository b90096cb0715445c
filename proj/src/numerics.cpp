#include "sip/numerics.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace sip::numerics {

namespace {

constexpr double kBetaTol = 1e-14;
constexpr int kBetaMaxIter = 300;

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cont_frac(double a, double b, double x) {
    const double tiny = 1e-30;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kBetaMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kBetaTol) return h;
    }
    throw std::runtime_error("reg_inc_beta: continued fraction did not converge");
}

}  // namespace

double reg_inc_beta(double x, double alpha, double beta) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("reg_inc_beta: x must lie in [0,1]");
    if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
        throw std::invalid_argument("reg_inc_beta: shape parameters must be finite and positive");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    const double log_front = std::lgamma(alpha + beta) - std::lgamma(alpha) - std::lgamma(beta) +
                             alpha * std::log(x) + beta * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (alpha + 1.0) / (alpha + beta + 2.0))
        return front * beta_cont_frac(alpha, beta, x) / alpha;
    return 1.0 - front * beta_cont_frac(beta, alpha, 1.0 - x) / beta;
}

Eigen::VectorXd solve_spd(const SpdSystem& system) {
    const Eigen::Index m = system.gram.rows();
    if (m < 1 || system.gram.cols() != m)
        throw std::invalid_argument("solve_spd: gram must be square with m >= 1");
    if (system.rhs.size() != m)
        throw std::invalid_argument("solve_spd: rhs size does not match gram");
    if (system.ridge < 0.0)
        throw std::invalid_argument("solve_spd: ridge must be nonnegative");

    const double asym = (system.gram - system.gram.transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(system.gram.cwiseAbs().maxCoeff(), 1e-300);
    if (asym > 1e-12 * scale)
        throw std::invalid_argument("solve_spd: gram is not symmetric");

    auto attempt = [&](double ridge) -> std::pair<bool, Eigen::VectorXd> {
        Eigen::MatrixXd A = system.gram;
        if (ridge > 0.0) A.diagonal().array() += ridge;
        Eigen::LLT<Eigen::MatrixXd> llt(A);
        if (llt.info() != Eigen::Success) return {false, {}};
        return {true, llt.solve(system.rhs)};
    };

    auto [ok, w] = attempt(system.ridge);
    if (!ok) {
        const double fallback = system.ridge + 1e-8 * system.gram.trace() / static_cast<double>(m);
        std::tie(ok, w) = attempt(fallback);
        if (!ok)
            throw std::runtime_error(
                "solve_spd: Cholesky failed, system not positive definite even with ridge");
    }
    return w;
}

Eigen::VectorXd central_diff_grad(const std::function<double(const Eigen::VectorXd&)>& f,
                                  const Eigen::VectorXd& x, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("central_diff_grad: step must be positive");
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index p = 0; p < x.size(); ++p) {
        const double x0 = x(p);
        xp(p) = x0 + step;
        const double fp = f(xp);
        xp(p) = x0 - step;
        const double fm = f(xp);
        xp(p) = x0;
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw std::runtime_error("central_diff_grad: non-finite function value");
        g(p) = (fp - fm) / (2.0 * step);
    }
    return g;
}

Eigen::VectorXd central_diff_grad(const std::function<double(const Eigen::VectorXd&)>& f,
                                  const Eigen::VectorXd& x) {
    const double xmax = x.size() > 0 ? x.cwiseAbs().maxCoeff() : 0.0;
    return central_diff_grad(f, x, 1e-5 * std::max(1.0, xmax));
}

Eigen::MatrixXd central_diff_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                                     const Eigen::VectorXd& x, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("central_diff_hessian: step must be positive");
    const Eigen::Index m = x.size();
    Eigen::MatrixXd H(m, m);
    const double f0 = f(x);
    Eigen::VectorXd xp = x;
    for (Eigen::Index p = 0; p < m; ++p) {
        xp(p) = x(p) + step;
        const double fpp = f(xp);
        xp(p) = x(p) - step;
        const double fmm = f(xp);
        xp(p) = x(p);
        H(p, p) = (fpp - 2.0 * f0 + fmm) / (step * step);
        for (Eigen::Index q = p + 1; q < m; ++q) {
            xp(p) = x(p) + step;
            xp(q) = x(q) + step;
            const double fa = f(xp);
            xp(q) = x(q) - step;
            const double fb = f(xp);
            xp(p) = x(p) - step;
            const double fd = f(xp);
            xp(q) = x(q) + step;
            const double fc = f(xp);
            xp(p) = x(p);
            xp(q) = x(q);
            H(p, q) = H(q, p) = (fa - fb - fc + fd) / (4.0 * step * step);
        }
    }
    H = 0.5 * (H + H.transpose()).eval();
    if (!H.allFinite())
        throw std::runtime_error("central_diff_hessian: non-finite entries");
    return H;
}

}  // namespace sip::numerics
