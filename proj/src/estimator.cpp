#include "sip/estimator.hpp"

#include <cmath>
#include <stdexcept>

#include "sip/numerics.hpp"

namespace sip::estimator {

namespace {

constexpr double kArmijoC = 1e-4;
constexpr int kMaxBacktracks = 60;

// Everything the risk and score share at one theta: transformed points,
// profiled spline fit, residuals.
struct ProfileFit {
    Eigen::VectorXd index;     // X_std * theta, unclamped
    Eigen::VectorXd u;         // F_d of the clamped index
    splines::SplineFit link;
    Eigen::VectorXd fitted;
    Eigen::VectorXd residual;
    double risk = 0.0;
};

ProfileFit profile_at(const Dataset& data, const Eigen::VectorXd& theta,
                      const splines::SplineBasisSpec& spec,
                      const transform::TransformSpec& tf) {
    ProfileFit pf;
    pf.index = data.X * theta;
    const int d = static_cast<int>(data.d());
    const Eigen::Index n = data.n();
    pf.u.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) pf.u(i) = transform::fd_cdf(pf.index(i), d, tf.a);

    const int dim = spec.dimension();
    Eigen::MatrixXd B(n, dim);
    for (Eigen::Index i = 0; i < n; ++i) B.row(i) = splines::eval_basis(pf.u(i), spec).transpose();
    numerics::SpdSystem system{B.transpose() * B, B.transpose() * data.y, 0.0};
    Eigen::VectorXd w = numerics::solve_spd(system);

    pf.link.spec = spec;
    pf.link.coefficients = w;
    pf.fitted = B * w;
    pf.residual = data.y - pf.fitted;
    pf.link.rss = pf.residual.squaredNorm();
    pf.risk = pf.link.rss / static_cast<double>(n);
    return pf;
}

// Gradient of the profiled risk in the free parametrization, reusing an
// already computed profile.  The projection-matrix derivative collapses to
// a weighted X^T product because the least-squares residual is orthogonal
// to the spline space.
Eigen::VectorXd score_from_profile(const Dataset& data, const HemisphereVector& theta,
                                   const splines::SplineBasisSpec& spec,
                                   const transform::TransformSpec& tf, const ProfileFit& pf) {
    const Eigen::Index n = data.n();
    const int d = static_cast<int>(data.d());
    Eigen::VectorXd c(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double gdot = splines::eval_spline_deriv(pf.link, pf.u(i));
        const double fdot = transform::fd_pdf(pf.index(i), d, tf.a);
        c(i) = 2.0 * pf.residual(i) * gdot * fdot;
    }
    const Eigen::VectorXd full = data.X.transpose() * c;  // d entries, one per coordinate
    const double theta_d = theta.last();
    const Eigen::VectorXd free = theta.free_part();
    Eigen::VectorXd s(d - 1);
    for (int p = 0; p < d - 1; ++p)
        s(p) = -(full(p) - free(p) / theta_d * full(d - 1)) / static_cast<double>(n);
    return s;
}

Eigen::VectorXd project_ball(const Eigen::VectorXd& v, double radius) {
    const double norm = v.norm();
    if (norm <= radius) return v;
    return v * (radius / norm);
}

HemisphereVector initial_point(const Dataset& data, const FitConfig& config) {
    const Eigen::Index d = data.d();
    switch (config.init) {
        case InitKind::last_axis: {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
            e(d - 1) = 1.0;
            return HemisphereVector::from_direction(e);
        }
        case InitKind::explicit_vector: {
            if (config.init_vector.size() != d)
                throw std::invalid_argument("minimize_risk: explicit init has wrong dimension");
            return HemisphereVector::from_direction(config.init_vector);
        }
        case InitKind::ols: {
            if (d >= data.n())
                throw std::invalid_argument(
                    "minimize_risk: OLS initialization requires d < n");
            numerics::SpdSystem system{data.X.transpose() * data.X, data.X.transpose() * data.y,
                                       0.0};
            Eigen::VectorXd beta = numerics::solve_spd(system);
            if (beta.norm() == 0.0) {
                Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
                e(d - 1) = 1.0;
                return HemisphereVector::from_direction(e);
            }
            return HemisphereVector::from_direction(beta);
        }
    }
    throw std::logic_error("minimize_risk: unknown init kind");
}

}  // namespace

HemisphereVector HemisphereVector::from_free(const Eigen::VectorXd& free_part) {
    const double s = 1.0 - free_part.squaredNorm();
    if (!(s > 0.0))
        throw std::invalid_argument("HemisphereVector: free part must satisfy ||free|| < 1");
    HemisphereVector h;
    h.theta.resize(free_part.size() + 1);
    h.theta.head(free_part.size()) = free_part;
    h.theta(free_part.size()) = std::sqrt(s);
    return h;
}

HemisphereVector HemisphereVector::from_direction(const Eigen::VectorXd& direction) {
    const double norm = direction.norm();
    if (!(norm > 0.0))
        throw std::invalid_argument("HemisphereVector: direction must be nonzero");
    HemisphereVector h;
    h.theta = direction / norm;
    if (h.theta(h.theta.size() - 1) < 0.0) h.theta = -h.theta;
    return h;
}

double empirical_risk(const Dataset& data_std, const HemisphereVector& theta,
                      const splines::SplineBasisSpec& spec,
                      const transform::TransformSpec& transform) {
    return profile_at(data_std, theta.theta, spec, transform).risk;
}

double risk_at_free(const Dataset& data_std, const Eigen::VectorXd& free_part,
                    const splines::SplineBasisSpec& spec,
                    const transform::TransformSpec& transform) {
    return profile_at(data_std, HemisphereVector::from_free(free_part).theta, spec, transform)
        .risk;
}

Eigen::VectorXd score(const Dataset& data_std, const HemisphereVector& theta,
                      const splines::SplineBasisSpec& spec,
                      const transform::TransformSpec& transform) {
    const ProfileFit pf = profile_at(data_std, theta.theta, spec, transform);
    Eigen::VectorXd s = score_from_profile(data_std, theta, spec, transform, pf);
    if (!s.allFinite())
        throw std::runtime_error("score: non-finite gradient (clamp-boundary pileup)");
    return s;
}

MinimizeResult minimize_risk(const Dataset& data_std, const splines::SplineBasisSpec& spec,
                             const transform::TransformSpec& transform,
                             const FitConfig& config) {
    const Eigen::Index d = data_std.d();
    if (d < 2) throw std::invalid_argument("minimize_risk: need d >= 2");
    const double cap = config.cap_c;
    if (!(cap > 0.0 && cap < 1.0))
        throw std::invalid_argument("minimize_risk: cap_c must lie in (0,1)");

    Eigen::VectorXd x = project_ball(initial_point(data_std, config).free_part(), cap);
    ProfileFit pf = profile_at(data_std, HemisphereVector::from_free(x).theta, spec, transform);
    double f = pf.risk;
    Eigen::VectorXd g =
        score_from_profile(data_std, HemisphereVector::from_free(x), spec, transform, pf);

    const Eigen::Index m = d - 1;
    Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(m, m);
    MinimizeResult result;
    result.iterations = 0;
    result.converged = g.lpNorm<Eigen::Infinity>() <= config.grad_tol;

    while (!result.converged && result.iterations < config.max_iter) {
        Eigen::VectorXd p = -(Hinv * g);
        if (p.dot(g) >= 0.0) {  // curvature model went bad, reset to steepest descent
            Hinv.setIdentity();
            p = -g;
        }
        double t = 1.0;
        bool accepted = false;
        Eigen::VectorXd x_new;
        ProfileFit pf_new;
        for (int bt = 0; bt < kMaxBacktracks; ++bt) {
            Eigen::VectorXd cand = project_ball(x + t * p, cap);
            ProfileFit pfc =
                profile_at(data_std, HemisphereVector::from_free(cand).theta, spec, transform);
            const double pred = g.dot(cand - x);
            const bool ok = pred < 0.0 ? (pfc.risk <= f + kArmijoC * pred) : (pfc.risk < f);
            if (ok) {
                accepted = true;
                x_new = std::move(cand);
                pf_new = std::move(pfc);
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;  // numerically stationary

        Eigen::VectorXd g_new = score_from_profile(
            data_std, HemisphereVector::from_free(x_new), spec, transform, pf_new);
        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd yv = g_new - g;
        const double sy = s.dot(yv);
        if (sy > 1e-12 * s.norm() * yv.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd left =
                Eigen::MatrixXd::Identity(m, m) - rho * s * yv.transpose();
            Hinv = left * Hinv * left.transpose() + rho * s * s.transpose();
        }
        x = std::move(x_new);
        f = pf_new.risk;
        g = std::move(g_new);
        ++result.iterations;
        result.converged = g.lpNorm<Eigen::Infinity>() <= config.grad_tol;
    }
    result.theta = HemisphereVector::from_free(x);
    return result;
}

SipFit fit_sip(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const FitConfig& config,
               const std::vector<std::string>& columns) {
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();
    if (n != y.size()) throw std::invalid_argument("fit_sip: X rows and y size differ");
    if (d < 1) throw std::invalid_argument("fit_sip: need at least one predictor");

    auto stage = [](const char* name, auto&& fn) {
        try {
            return fn();
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(std::string("fit_sip[") + name + "]: " + e.what());
        } catch (const std::runtime_error& e) {
            throw std::runtime_error(std::string("fit_sip[") + name + "]: " + e.what());
        }
    };

    SipFit fit;
    fit.n = n;
    fit.d = d;
    fit.columns = columns;

    Dataset std_data;
    std_data.y = y;
    transform::TransformSpec tf;
    stage("standardize", [&] {
        auto [Xs, center, scale] = transform::standardize(X);
        std_data.X = std::move(Xs);
        tf.d = static_cast<int>(d);
        tf.center = std::move(center);
        tf.scale = std::move(scale);
        return 0;
    });
    stage("radius", [&] {
        tf.a = transform::select_radius(std_data.X, config.radius_quantile);
        return 0;
    });

    const int N = splines::knot_count(static_cast<int>(n), config.c1, config.c2);
    const splines::SplineBasisSpec spec(4, N);
    if (n < spec.dimension())
        throw std::invalid_argument("fit_sip[knots]: fewer observations than basis functions");

    if (d == 1) {
        fit.theta_std.theta = Eigen::VectorXd::Ones(1);
        fit.iterations = 0;
        fit.converged = true;
    } else {
        const MinimizeResult res =
            stage("minimize", [&] { return minimize_risk(std_data, spec, tf, config); });
        fit.theta_std = res.theta;
        fit.iterations = res.iterations;
        fit.converged = res.converged;
    }

    stage("link", [&] {
        const ProfileFit pf = profile_at(std_data, fit.theta_std.theta, spec, tf);
        fit.link = pf.link;
        fit.risk = pf.risk;
        return 0;
    });
    fit.transform = std::move(tf);

    // Direction in the original coordinates: undo the per-column scaling.
    const Eigen::VectorXd raw_dir = fit.theta_std.theta.cwiseQuotient(fit.transform.scale);
    fit.theta_hat = HemisphereVector::from_direction(raw_dir);
    return fit;
}

double predict(const SipFit& fit, const Eigen::VectorXd& x_raw) {
    if (x_raw.size() != fit.d) throw std::invalid_argument("predict: dimension mismatch");
    const Eigen::VectorXd xs = fit.transform.apply(x_raw);
    const double v = xs.dot(fit.theta_std.theta);
    const double u = transform::fd_cdf(v, static_cast<int>(fit.d), fit.transform.a);
    return splines::eval_spline(fit.link, u);
}

std::vector<std::pair<double, double>> link_curve(const SipFit& fit, int grid_size) {
    if (grid_size < 2) throw std::invalid_argument("link_curve: grid_size must be >= 2");
    const double a = fit.transform.a;
    std::vector<std::pair<double, double>> curve;
    curve.reserve(static_cast<std::size_t>(grid_size));
    for (int k = 0; k < grid_size; ++k) {
        const double v = -a + 2.0 * a * static_cast<double>(k) / (grid_size - 1);
        const double u = transform::fd_cdf(v, static_cast<int>(fit.d), fit.transform.a);
        curve.emplace_back(v, splines::eval_spline(fit.link, u));
    }
    return curve;
}

}  // namespace sip::estimator
