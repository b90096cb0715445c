#include "sip/splines.hpp"

#include <cmath>
#include <stdexcept>

#include "sip/numerics.hpp"

namespace sip::splines {

SplineBasisSpec::SplineBasisSpec(int k, int n_interior) : order(k), interior_knots(n_interior) {
    if (k < 2 || k > 4) throw std::invalid_argument("SplineBasisSpec: order must be 2, 3 or 4");
    if (n_interior < 0) throw std::invalid_argument("SplineBasisSpec: interior_knots must be >= 0");
}

Eigen::VectorXd SplineBasisSpec::knot_array() const {
    const int k = order;
    const int N = interior_knots;
    const double h = knot_spacing();
    Eigen::VectorXd t(N + 2 * k);
    for (int i = 0; i < k; ++i) t(i) = 0.0;
    for (int j = 1; j <= N; ++j) t(k - 1 + j) = j * h;
    for (int i = 0; i < k; ++i) t(k + N + i) = 1.0;
    return t;
}

int knot_count(int n, int c1, int c2) {
    if (n < 2) throw std::invalid_argument("knot_count: n must be >= 2");
    if (c1 < 1 || c2 < 1) throw std::invalid_argument("knot_count: c1, c2 must be positive");
    const int base = static_cast<int>(std::floor(std::pow(static_cast<double>(n), 1.0 / 5.5)));
    return std::min(c1 * base, c2);
}

namespace {

// Index of the knot interval containing u, with u = 1 closing the last one.
int interval_index(double u, int N) {
    int ell = static_cast<int>(std::floor(u * (N + 1)));
    if (ell > N) ell = N;
    return ell;
}

// De Boor triangular recursion over the full clamped knot array, 0/0 := 0.
// Returns values of all order-m basis functions for m = target order.
Eigen::VectorXd raise_order(const Eigen::VectorXd& t, double u, int ell, int k_target) {
    // Order-1 seed: indicator of the interval [t_i, t_{i+1}) containing u.
    const int n_seed = static_cast<int>(t.size()) - 1;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n_seed);
    b(ell) = 1.0;
    for (int m = 2; m <= k_target; ++m) {
        const int n_m = static_cast<int>(t.size()) - m;
        Eigen::VectorXd bm = Eigen::VectorXd::Zero(n_m);
        for (int i = 0; i < n_m; ++i) {
            double left = 0.0, right = 0.0;
            const double den_l = t(i + m - 1) - t(i);
            const double den_r = t(i + m) - t(i + 1);
            if (den_l > 0.0) left = (u - t(i)) / den_l * b(i);
            if (den_r > 0.0) right = (t(i + m) - u) / den_r * b(i + 1);
            bm(i) = left + right;
        }
        b = std::move(bm);
    }
    return b;
}

}  // namespace

Eigen::VectorXd eval_basis(double u, const SplineBasisSpec& spec) {
    if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("eval_basis: u must lie in [0,1]");
    const Eigen::VectorXd t = spec.knot_array();
    const int ell = spec.order - 1 + interval_index(u, spec.interior_knots);
    Eigen::VectorXd b = raise_order(t, u, ell, spec.order);
    // raise_order returns N + k values, matching the basis dimension.
    return b;
}

Eigen::VectorXd eval_basis_order4_deriv(double u, const SplineBasisSpec& spec) {
    if (spec.order != 4)
        throw std::invalid_argument("eval_basis_order4_deriv: spec must have order 4");
    if (!(u >= 0.0 && u <= 1.0))
        throw std::invalid_argument("eval_basis_order4_deriv: u must lie in [0,1]");
    const Eigen::VectorXd t = spec.knot_array();
    const int ell = 3 + interval_index(u, spec.interior_knots);
    // Order-3 basis values on the same knot array (one extra function).
    const Eigen::VectorXd b3 = raise_order(t, u, ell, 3);
    const int dim = spec.dimension();
    Eigen::VectorXd d(dim);
    for (int i = 0; i < dim; ++i) {
        double left = 0.0, right = 0.0;
        const double den_l = t(i + 3) - t(i);
        const double den_r = t(i + 4) - t(i + 1);
        if (den_l > 0.0) left = b3(i) / den_l;
        if (den_r > 0.0) right = b3(i + 1) / den_r;
        d(i) = 3.0 * (left - right);
    }
    return d;
}

SplineFit fit_ls_spline(const Eigen::VectorXd& u, const Eigen::VectorXd& y,
                        const SplineBasisSpec& spec) {
    const Eigen::Index n = u.size();
    if (y.size() != n) throw std::invalid_argument("fit_ls_spline: u and y sizes differ");
    const int dim = spec.dimension();
    Eigen::MatrixXd B(n, dim);
    for (Eigen::Index i = 0; i < n; ++i) B.row(i) = eval_basis(u(i), spec).transpose();

    numerics::SpdSystem system{B.transpose() * B, B.transpose() * y, 0.0};
    Eigen::VectorXd w;
    try {
        w = numerics::solve_spd(system);
    } catch (const std::runtime_error&) {
        throw std::runtime_error(
            "fit_ls_spline: singular design (degenerate u distribution over the knot grid)");
    }
    SplineFit fit;
    fit.spec = spec;
    fit.coefficients = w;
    fit.rss = (y - B * w).squaredNorm();
    return fit;
}

double eval_spline(const SplineFit& fit, double u) {
    return fit.coefficients.dot(eval_basis(u, fit.spec));
}

double eval_spline_deriv(const SplineFit& fit, double u) {
    return fit.coefficients.dot(eval_basis_order4_deriv(u, fit.spec));
}

}  // namespace sip::splines
