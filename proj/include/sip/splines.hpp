#pragma once

#include <Eigen/Core>

namespace sip::splines {

/// Equally spaced knot grid on [0,1] for B-splines of order k in {2,3,4}.
///
/// Interior knots t_j = j*h, j = 1..N, h = 1/(N+1); boundary knots 0 and 1
/// are repeated k times (clamped).  Basis dimension is N + k.
struct SplineBasisSpec {
    int order = 4;
    int interior_knots = 0;

    SplineBasisSpec() = default;
    SplineBasisSpec(int k, int n_interior);

    int dimension() const { return interior_knots + order; }
    double knot_spacing() const { return 1.0 / (interior_knots + 1); }

    /// Full clamped knot array of size interior_knots + 2*order.
    Eigen::VectorXd knot_array() const;
};

/// Least-squares spline fit: coefficients in the B-spline basis of spec
/// plus the achieved residual sum of squares.
struct SplineFit {
    SplineBasisSpec spec;
    Eigen::VectorXd coefficients;
    double rss = 0.0;
};

/// Interior-knot rule N = min(c1*floor(n^{1/5.5}), c2).
int knot_count(int n, int c1, int c2);

/// All N+k basis values at u in [0,1]; u = 1 is assigned to the closed
/// last interval.  Nonnegative, sum to 1, at most k entries nonzero.
Eigen::VectorXd eval_basis(double u, const SplineBasisSpec& spec);

/// Exact derivatives d/du B_{j,4}(u) for an order-4 spec (all N+4 of them).
Eigen::VectorXd eval_basis_order4_deriv(double u, const SplineBasisSpec& spec);

/// Least-squares fit of y on the spline basis at sample points u, via the
/// normal equations B^T B w = B^T y solved by numerics::solve_spd.
SplineFit fit_ls_spline(const Eigen::VectorXd& u, const Eigen::VectorXd& y,
                        const SplineBasisSpec& spec);

/// Fitted value at u: dot(coefficients, eval_basis(u)).
double eval_spline(const SplineFit& fit, double u);

/// Derivative of the fitted spline at u (order-4 fits only).
double eval_spline_deriv(const SplineFit& fit, double u);

}  // namespace sip::splines
