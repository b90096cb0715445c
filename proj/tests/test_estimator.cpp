#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "sip/estimator.hpp"
#include "sip/montecarlo.hpp"
#include "sip/numerics.hpp"
#include "sip/rng.hpp"

using namespace sip;
using estimator::FitConfig;
using estimator::HemisphereVector;

namespace {

struct Prepared {
    Dataset data;
    transform::TransformSpec tf;
    splines::SplineBasisSpec spec;
};

Prepared prepare(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int c1 = 1, int c2 = 5) {
    Prepared p;
    auto [Xs, center, scale] = transform::standardize(X);
    p.data.X = Xs;
    p.data.y = y;
    p.tf.d = static_cast<int>(X.cols());
    p.tf.center = center;
    p.tf.scale = scale;
    p.tf.a = transform::select_radius(Xs, 0.95);
    p.spec = splines::SplineBasisSpec(4, splines::knot_count(static_cast<int>(X.rows()), c1, c2));
    return p;
}

Eigen::MatrixXd random_matrix(int n, int d, rng::CounterRng& gen) {
    Eigen::MatrixXd X(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) X(i, j) = gen.normal();
    return X;
}

// Instances for the gradient oracle must keep every observation away from
// the clamp boundary and every transformed point away from a knot image.
bool clean_configuration(const Prepared& p, const HemisphereVector& theta) {
    const Eigen::VectorXd idx = p.data.X * theta.theta;
    const int N = p.spec.interior_knots;
    for (Eigen::Index i = 0; i < idx.size(); ++i) {
        if (std::fabs(std::fabs(idx(i)) - p.tf.a) < 1e-3) return false;
        if (std::fabs(idx(i)) > p.tf.a) continue;  // clamped flat on both sides
        const double u = transform::fd_cdf(idx(i), p.tf.d, p.tf.a);
        for (int j = 0; j <= N + 1; ++j)
            if (std::fabs(u - static_cast<double>(j) / (N + 1)) < 1e-3) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("HemisphereVector: lifting and sign normalization") {
    Eigen::VectorXd free(2);
    free << 0.6, 0.0;
    const HemisphereVector h = HemisphereVector::from_free(free);
    CHECK(h.theta.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(h.last() == doctest::Approx(0.8));

    Eigen::VectorXd dir(3);
    dir << 1.0, 2.0, -2.0;
    const HemisphereVector f = HemisphereVector::from_direction(dir);
    CHECK(f.last() > 0.0);
    CHECK(f.theta.norm() == doctest::Approx(1.0).epsilon(1e-14));

    Eigen::VectorXd unit(2);
    unit << 1.0, 0.0;
    CHECK_THROWS_AS(HemisphereVector::from_free(unit), std::invalid_argument);
}

TEST_CASE("empirical_risk: representable signals give near-zero risk") {
    rng::CounterRng gen(41);
    const int n = 120;
    Eigen::MatrixXd X = random_matrix(n, 2, gen);
    Eigen::VectorXd theta(2);
    theta << 1.0, 1.0;
    theta.normalize();

    Prepared p = prepare(X, Eigen::VectorXd::Zero(n));
    const HemisphereVector h = HemisphereVector::from_direction(theta);

    // Y built as an exact cubic spline of U_theta: risk collapses to rounding.
    Eigen::VectorXd u(n);
    const Eigen::VectorXd idx = p.data.X * h.theta;
    for (int i = 0; i < n; ++i) u(i) = transform::fd_cdf(idx(i), 2, p.tf.a);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd b = splines::eval_basis(u(i), p.spec);
        Eigen::VectorXd coef(p.spec.dimension());
        for (int j = 0; j < p.spec.dimension(); ++j) coef(j) = std::sin(j + 1.0);
        y(i) = b.dot(coef);
    }
    p.data.y = y;
    const double risk = estimator::empirical_risk(p.data, h, p.spec, p.tf);
    CHECK(risk <= 1e-16 * y.cwiseAbs().maxCoeff() * y.cwiseAbs().maxCoeff());

    p.data.y = Eigen::VectorXd::Constant(n, 2.5);
    CHECK(estimator::empirical_risk(p.data, h, p.spec, p.tf) <= 1e-20);
}

TEST_CASE("empirical_risk: bounded by the response variance and ordered at theta0") {
    const Dataset data = montecarlo::gen_example1(200, 0, 0.3, 77);
    Prepared p = prepare(data.X, data.y);

    const HemisphereVector at_truth = HemisphereVector::from_direction(
        (Eigen::VectorXd(2) << 1.0, 1.0).finished());
    const HemisphereVector off = HemisphereVector::from_direction(
        (Eigen::VectorXd(2) << 1.0, -1.0).finished());

    const double risk_truth = estimator::empirical_risk(p.data, at_truth, p.spec, p.tf);
    const double risk_off = estimator::empirical_risk(p.data, off, p.spec, p.tf);
    const double var_y = (data.y.array() - data.y.mean()).square().sum() / data.y.size();

    CHECK(risk_truth >= 0.0);
    CHECK(risk_truth <= var_y);
    CHECK(risk_off <= var_y);
    CHECK(risk_truth < risk_off);
    CHECK(risk_truth == doctest::Approx(0.09).epsilon(1.0));  // sigma0^2 + spline bias
}

TEST_CASE("score: exchange symmetry gives a vanishing component") {
    rng::CounterRng gen(43);
    const int half = 20;
    Eigen::MatrixXd Xh = random_matrix(half, 2, gen);
    Eigen::VectorXd yh(half);
    for (int i = 0; i < half; ++i) yh(i) = gen.normal();

    Eigen::MatrixXd X(2 * half, 2);
    Eigen::VectorXd y(2 * half);
    X.topRows(half) = Xh;
    X.bottomRows(half) = Xh.rowwise().reverse();  // swap x1 and x2
    y.head(half) = yh;
    y.tail(half) = yh;

    Prepared p = prepare(X, y);
    Eigen::VectorXd free(1);
    free << 1.0 / std::sqrt(2.0);
    const Eigen::VectorXd s =
        estimator::score(p.data, HemisphereVector::from_free(free), p.spec, p.tf);
    CHECK(std::fabs(s(0)) <= 1e-10);
}

TEST_CASE("score: identically zero response gives an exactly zero score") {
    rng::CounterRng gen(47);
    Eigen::MatrixXd X = random_matrix(50, 3, gen);
    Prepared p = prepare(X, Eigen::VectorXd::Zero(50));
    Eigen::VectorXd free(2);
    free << 0.3, -0.2;
    const Eigen::VectorXd s =
        estimator::score(p.data, HemisphereVector::from_free(free), p.spec, p.tf);
    CHECK(s.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("score: central-difference oracle on random instances") {
    int tested = 0;
    std::uint64_t seed = 1000;
    while (tested < 20) {
        rng::CounterRng gen(seed++);
        const int n = 40 + static_cast<int>(gen.uniform() * 60);
        const int d = 2 + static_cast<int>(gen.uniform() * 3.999);
        Eigen::MatrixXd X = random_matrix(n, d, gen);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i)
            y(i) = std::sin(X.row(i).sum() / std::sqrt(static_cast<double>(d))) + 0.3 * gen.normal();
        Prepared p = prepare(X, y);

        Eigen::VectorXd free(d - 1);
        for (int j = 0; j < d - 1; ++j) free(j) = 0.4 * gen.normal();
        if (free.norm() > 0.7) free *= 0.7 / free.norm();
        const HemisphereVector theta = HemisphereVector::from_free(free);
        if (!clean_configuration(p, theta)) continue;

        const Eigen::VectorXd analytic = estimator::score(p.data, theta, p.spec, p.tf);
        auto risk_fn = [&](const Eigen::VectorXd& fp) {
            return estimator::risk_at_free(p.data, fp, p.spec, p.tf);
        };
        const Eigen::VectorXd fd = numerics::central_diff_grad(risk_fn, free, 1e-5);
        const double rel = (analytic - fd).norm() / std::max(fd.norm(), 1e-12);
        CHECK(rel <= 1e-4);
        ++tested;
    }
}

TEST_CASE("minimize_risk: Example 1 recovers the true direction") {
    const Dataset data = montecarlo::gen_example1(100, 0, 0.3, 2024);
    FitConfig config;
    const estimator::SipFit fit = estimator::fit_sip(data.X, data.y, config, data.columns);
    const Eigen::VectorXd theta0 = montecarlo::example1_theta0();
    CHECK((fit.theta_hat.theta - theta0).norm() < 0.05);
    CHECK(fit.risk < (data.y.array() - data.y.mean()).square().mean());
}

TEST_CASE("minimize_risk: noise-free linear link is recovered") {
    rng::CounterRng gen(53);
    const int n = 200, d = 3;
    Eigen::MatrixXd X = random_matrix(n, d, gen);
    Eigen::VectorXd theta0(d);
    theta0 << 1.0, -0.5, 2.0;
    theta0.normalize();
    if (theta0(d - 1) < 0) theta0 = -theta0;
    const Eigen::VectorXd y = X * theta0;

    // With the default 95% radius the handful of clamped points carries a
    // small boundary bias; the direction is still recovered closely.
    FitConfig config;
    const estimator::SipFit fit = estimator::fit_sip(X, y, config, {});
    CHECK(fit.converged);
    CHECK((fit.theta_hat.theta - theta0).norm() < 2e-2);

    // Radius covering every observation removes the clamping entirely and
    // leaves only the spline approximation of the inverse-CDF link.
    FitConfig full;
    full.radius_quantile = 1.0;
    const estimator::SipFit unclamped = estimator::fit_sip(X, y, full, {});
    CHECK((unclamped.theta_hat.theta - theta0).norm() < 2e-3);
    CHECK(unclamped.risk < 1e-4);
}

TEST_CASE("minimize_risk: stationary start returns immediately") {
    rng::CounterRng gen(59);
    Eigen::MatrixXd X = random_matrix(60, 2, gen);
    Prepared p = prepare(X, Eigen::VectorXd::Zero(60));
    FitConfig config;
    config.init = estimator::InitKind::last_axis;
    const estimator::MinimizeResult res = estimator::minimize_risk(p.data, p.spec, p.tf, config);
    CHECK(res.iterations == 0);
    CHECK(res.converged);
    CHECK(res.theta.last() == doctest::Approx(1.0));
}

TEST_CASE("minimize_risk: explicit start outside the cap is projected back") {
    rng::CounterRng gen(63);
    Eigen::MatrixXd X = random_matrix(80, 3, gen);
    Eigen::VectorXd y(80);
    for (int i = 0; i < 80; ++i) y(i) = X(i, 0) + 0.2 * gen.normal();
    Prepared p = prepare(X, y);

    FitConfig config;
    config.init = estimator::InitKind::explicit_vector;
    config.init_vector = (Eigen::VectorXd(3) << 1.0, 0.0, 1e-6).finished();  // nearly on the rim
    const estimator::MinimizeResult res = estimator::minimize_risk(p.data, p.spec, p.tf, config);
    CHECK(res.theta.last() > 0.0);
    CHECK(res.theta.free_part().norm() <= config.cap_c + 1e-12);
    CHECK(res.theta.theta.norm() == doctest::Approx(1.0).epsilon(1e-12));

    config.init_vector = Eigen::VectorXd::Ones(2);  // wrong dimension
    CHECK_THROWS_AS(estimator::minimize_risk(p.data, p.spec, p.tf, config),
                    std::invalid_argument);

    FitConfig bad_cap;
    bad_cap.cap_c = 1.5;
    CHECK_THROWS_AS(estimator::minimize_risk(p.data, p.spec, p.tf, bad_cap),
                    std::invalid_argument);
}

TEST_CASE("minimize_risk: OLS initialization rejects d >= n") {
    rng::CounterRng gen(61);
    Eigen::MatrixXd X = random_matrix(10, 12, gen);
    Eigen::VectorXd y(10);
    for (int i = 0; i < 10; ++i) y(i) = gen.normal();
    Prepared p = prepare(X, y, 1, 2);
    FitConfig config;  // init defaults to ols
    CHECK_THROWS_AS(estimator::minimize_risk(p.data, p.spec, p.tf, config),
                    std::invalid_argument);
}

TEST_CASE("fit_sip: d larger than n completes with finite risk") {
    const Dataset data = montecarlo::gen_example2(50, 100, 0.2, 99);
    FitConfig config;
    config.init = estimator::InitKind::last_axis;
    const estimator::SipFit fit = estimator::fit_sip(data.X, data.y, config, data.columns);
    CHECK(std::isfinite(fit.risk));
    CHECK(fit.theta_hat.theta.size() == 100);
    CHECK(fit.theta_hat.last() > 0.0);
}

TEST_CASE("fit_sip: achieved risk does not exceed the initial risk") {
    for (std::uint64_t seed : {5u, 6u, 7u}) {
        const Dataset data = montecarlo::gen_example2(150, 4, 0.2, seed);
        Prepared p = prepare(data.X, data.y);
        FitConfig config;
        config.init = estimator::InitKind::last_axis;
        const estimator::MinimizeResult res =
            estimator::minimize_risk(p.data, p.spec, p.tf, config);
        Eigen::VectorXd e = Eigen::VectorXd::Zero(4);
        e(3) = 1.0;
        const double risk_init = estimator::empirical_risk(
            p.data, HemisphereVector::from_direction(e), p.spec, p.tf);
        const double risk_final = estimator::empirical_risk(p.data, res.theta, p.spec, p.tf);
        CHECK(risk_final <= risk_init + 1e-14);
    }
}

TEST_CASE("fit_sip: scale invariance of the fitted direction") {
    const Dataset data = montecarlo::gen_example1(150, 0, 0.3, 31);
    FitConfig config;
    const estimator::SipFit base = estimator::fit_sip(data.X, data.y, config, {});
    const estimator::SipFit scaled = estimator::fit_sip(data.X, 7.5 * data.y, config, {});
    CHECK((base.theta_hat.theta - scaled.theta_hat.theta).norm() < 1e-6);
}

TEST_CASE("fit_sip: sign identifiability across random replications") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Dataset data = montecarlo::gen_example2(80, 5, 0.2, seed);
        const estimator::SipFit fit = estimator::fit_sip(data.X, data.y, FitConfig{}, {});
        CHECK(fit.theta_hat.last() > 0.0);
        CHECK(fit.theta_std.last() > 0.0);
    }
}

TEST_CASE("predict: training rows of exactly representable data are reproduced") {
    // d = 1 leaves no direction to estimate, so a response that is an exact
    // spline of the transformed index is interpolated to rounding error.
    rng::CounterRng gen(67);
    const int n = 150;
    Eigen::MatrixXd X(n, 1);
    for (int i = 0; i < n; ++i) X(i, 0) = gen.normal();

    Prepared p = prepare(X, Eigen::VectorXd::Zero(n));
    Eigen::VectorXd coef(p.spec.dimension());
    for (int j = 0; j < p.spec.dimension(); ++j) coef(j) = std::cos(0.7 * j);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        const double u = transform::fd_cdf(p.data.X(i, 0), 1, p.tf.a);
        y(i) = coef.dot(splines::eval_basis(u, p.spec));
    }
    const estimator::SipFit fit = estimator::fit_sip(X, y, FitConfig{}, {});
    for (int i = 0; i < n; ++i)
        CHECK(std::fabs(estimator::predict(fit, X.row(i).transpose()) - y(i)) < 1e-8);

    // far outside the ball the prediction equals the boundary value
    Eigen::VectorXd far(1), farther(1);
    far << 50.0;
    farther << 500.0;
    CHECK(estimator::predict(fit, far) ==
          doctest::Approx(estimator::predict(fit, farther)).epsilon(1e-12));
}

TEST_CASE("predict: spline-link data with an estimated direction") {
    rng::CounterRng gen(69);
    const int n = 150, d = 3;
    Eigen::MatrixXd X = random_matrix(n, d, gen);
    Eigen::VectorXd free(2);
    free << 0.5, 0.3;
    const HemisphereVector theta0 = HemisphereVector::from_free(free);

    Prepared p = prepare(X, Eigen::VectorXd::Zero(n));
    Eigen::VectorXd coef(p.spec.dimension());
    for (int j = 0; j < p.spec.dimension(); ++j) coef(j) = std::sin(1.0 + j);
    Eigen::VectorXd y(n);
    const Eigen::VectorXd idx = p.data.X * theta0.theta;
    for (int i = 0; i < n; ++i)
        y(i) = coef.dot(splines::eval_basis(transform::fd_cdf(idx(i), d, p.tf.a), p.spec));

    const estimator::SipFit fit = estimator::fit_sip(X, y, FitConfig{}, {});
    CHECK(fit.risk < 1e-10);  // noise-free and representable at theta0
    for (int i = 0; i < n; ++i)
        CHECK(std::fabs(estimator::predict(fit, X.row(i).transpose()) - y(i)) < 1e-4);
}

TEST_CASE("predict: recovers the sine link along the fitted index") {
    const Dataset data = montecarlo::gen_example2(500, 4, 0.2, 31337);
    const estimator::SipFit fit =
        estimator::fit_sip(data.X, data.y, FitConfig{}, data.columns);

    // walk x = nu * theta_hat over the central 90% of [-a, a]
    const double a = fit.transform.a;
    double sup = 0.0;
    for (int k = 0; k <= 200; ++k) {
        const double nu = -0.9 * a + 1.8 * a * k / 200.0;
        const Eigen::VectorXd x = nu * fit.theta_hat.theta;
        sup = std::max(sup, std::fabs(estimator::predict(fit, x) - std::sin(0.25 * M_PI * nu)));
    }
    CHECK(sup < 0.1);
}

TEST_CASE("link_curve: endpoints, constants and consistency with predict") {
    const Dataset data = montecarlo::gen_example2(200, 4, 0.2, 123);
    const estimator::SipFit fit = estimator::fit_sip(data.X, data.y, FitConfig{}, {});

    const auto two = estimator::link_curve(fit, 2);
    CHECK(two.size() == 2);
    CHECK(two.front().first == doctest::Approx(-fit.transform.a));
    CHECK(two.back().first == doctest::Approx(fit.transform.a));

    const auto curve = estimator::link_curve(fit, 33);
    for (const auto& [v, g] : curve) {
        const double u = transform::fd_cdf(v, 4, fit.transform.a);
        CHECK(g == doctest::Approx(splines::eval_spline(fit.link, u)).epsilon(1e-14));
    }

    // constant-link fit: constant response
    rng::CounterRng gen(71);
    Eigen::MatrixXd X = random_matrix(60, 2, gen);
    Eigen::VectorXd flat_y = Eigen::VectorXd::Constant(60, 3.5);
    FitConfig config;
    config.init = estimator::InitKind::last_axis;
    const estimator::SipFit flat = estimator::fit_sip(X, flat_y, config, {});
    for (const auto& [v, g] : estimator::link_curve(flat, 9))
        CHECK(g == doctest::Approx(3.5).epsilon(1e-9));
}
