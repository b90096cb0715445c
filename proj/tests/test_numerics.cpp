#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "oracles.hpp"
#include "sip/numerics.hpp"
#include "sip/rng.hpp"

using namespace sip;

TEST_CASE("reg_inc_beta: symmetric and uniform special cases") {
    for (double a : {0.5, 1.0, 1.5, 3.0, 25.5})
        CHECK(numerics::reg_inc_beta(0.5, a, a) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(numerics::reg_inc_beta(0.75, 1.0, 1.0) == doctest::Approx(0.75).epsilon(1e-13));
    CHECK(numerics::reg_inc_beta(0.0, 2.0, 3.0) == 0.0);
    CHECK(numerics::reg_inc_beta(1.0, 2.0, 3.0) == 1.0);
}

TEST_CASE("reg_inc_beta: quadrature oracle agreement") {
    // Frozen from the adaptive Gauss-Legendre oracle below.
    CHECK(std::fabs(numerics::reg_inc_beta(0.9, 1.5, 1.5) - 0.94795598066908609) < 1e-12);
    CHECK(std::fabs(numerics::reg_inc_beta(0.9, 1.5, 1.5) -
                    oracle::reg_inc_beta_quad(0.9, 1.5, 1.5)) < 1e-10);
    for (double x : {0.05, 0.3, 0.62, 0.99}) {
        for (double ab : {1.0, 2.5, 8.0}) {
            CHECK(std::fabs(numerics::reg_inc_beta(x, ab, ab) -
                            oracle::reg_inc_beta_quad(x, ab, ab)) < 1e-10);
        }
    }
}

TEST_CASE("reg_inc_beta: domain errors") {
    CHECK_THROWS_AS(numerics::reg_inc_beta(-0.1, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(numerics::reg_inc_beta(1.1, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(numerics::reg_inc_beta(0.5, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(numerics::reg_inc_beta(0.5, 1.0, -2.0), std::invalid_argument);
}

TEST_CASE("reg_inc_beta: reflection identity over random arguments") {
    rng::CounterRng gen(7);
    for (int k = 0; k < 200; ++k) {
        const double x = gen.uniform();
        const double a = 0.2 + 10.0 * gen.uniform();
        const double b = 0.2 + 10.0 * gen.uniform();
        const double lhs = numerics::reg_inc_beta(x, a, b) + numerics::reg_inc_beta(1.0 - x, b, a);
        CHECK(std::fabs(lhs - 1.0) < 1e-12);
    }
}

TEST_CASE("reg_inc_beta: nondecreasing in x for the transform shapes") {
    for (int d = 1; d <= 50; ++d) {
        const double shape = 0.5 * (d + 1);
        double prev = 0.0;
        for (int i = 0; i <= 1000; ++i) {
            const double x = static_cast<double>(i) / 1000.0;
            const double v = numerics::reg_inc_beta(x, shape, shape);
            CHECK(v >= prev - 1e-15);
            prev = v;
        }
        CHECK(prev == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("solve_spd: identity and diagonal systems") {
    numerics::SpdSystem id{Eigen::MatrixXd::Identity(3, 3), Eigen::Vector3d(1, 2, 3), 0.0};
    CHECK((numerics::solve_spd(id) - Eigen::Vector3d(1, 2, 3)).norm() < 1e-14);

    Eigen::MatrixXd diag = Eigen::Vector2d(2, 4).asDiagonal();
    numerics::SpdSystem ds{diag, Eigen::Vector2d(2, 8), 0.0};
    CHECK((numerics::solve_spd(ds) - Eigen::Vector2d(1, 2)).norm() < 1e-14);
}

TEST_CASE("solve_spd: random system matches the explicit-inverse oracle") {
    rng::CounterRng gen(11);
    const int m = 10;
    Eigen::MatrixXd M(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) M(i, j) = gen.normal();
    Eigen::MatrixXd gram = M.transpose() * M + 0.5 * Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd rhs(m);
    for (int i = 0; i < m; ++i) rhs(i) = gen.normal();

    const Eigen::VectorXd w = numerics::solve_spd({gram, rhs, 0.0});
    const Eigen::VectorXd w_oracle = gram.inverse() * rhs;
    CHECK((w - w_oracle).norm() < 1e-9 * w_oracle.norm());
}

TEST_CASE("solve_spd: residual property on random SPD instances") {
    rng::CounterRng gen(13);
    for (int m : {2, 5, 20, 80, 200}) {
        Eigen::MatrixXd M(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) M(i, j) = gen.normal();
        Eigen::MatrixXd gram = M.transpose() * M + 1e-3 * Eigen::MatrixXd::Identity(m, m);
        gram = 0.5 * (gram + gram.transpose()).eval();
        Eigen::VectorXd rhs(m);
        for (int i = 0; i < m; ++i) rhs(i) = gen.normal();
        const Eigen::VectorXd w = numerics::solve_spd({gram, rhs, 0.0});
        CHECK((gram * w - rhs).norm() <= 1e-10 * rhs.norm());
    }
}

TEST_CASE("solve_spd: failure reporting and ridge fallback") {
    Eigen::MatrixXd bad(2, 2);
    bad << 0, 1, 0, 0;  // not symmetric
    CHECK_THROWS_AS(numerics::solve_spd({bad, Eigen::Vector2d(1, 1), 0.0}), std::invalid_argument);

    // Rank-deficient but nonzero trace: the fallback ridge rescues it.
    Eigen::MatrixXd singular(2, 2);
    singular << 1, 1, 1, 1;
    const Eigen::VectorXd w = numerics::solve_spd({singular, Eigen::Vector2d(1, 1), 0.0});
    CHECK(w.allFinite());

    // Zero matrix has zero trace, so even the fallback fails.
    CHECK_THROWS_AS(numerics::solve_spd({Eigen::MatrixXd::Zero(2, 2), Eigen::Vector2d(1, 1), 0.0}),
                    std::runtime_error);
}

TEST_CASE("central_diff_grad: quadratic, constant and product rules") {
    auto norm2 = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
    Eigen::VectorXd x(2);
    x << 1.0, -2.0;
    const Eigen::VectorXd g = numerics::central_diff_grad(norm2, x, 1e-6);
    CHECK(std::fabs(g(0) - 2.0) < 1e-6);
    CHECK(std::fabs(g(1) + 4.0) < 1e-6);

    auto constant = [](const Eigen::VectorXd&) { return 3.25; };
    CHECK(numerics::central_diff_grad(constant, x).norm() == 0.0);

    auto prod = [](const Eigen::VectorXd& v) { return std::sin(v(0)) * v(1); };
    Eigen::VectorXd p(2);
    p << 0.3, 2.0;
    const Eigen::VectorXd gp = numerics::central_diff_grad(prod, p, 1e-6);
    CHECK(std::fabs(gp(0) - 1.9106729782512120) < 1e-6);  // 2 cos(0.3)
    CHECK(std::fabs(gp(1) - 0.29552020666133958) < 1e-6);  // sin(0.3)
}

TEST_CASE("central_diff_grad: propagates non-finite evaluations") {
    auto f = [](const Eigen::VectorXd& v) { return std::sqrt(v(0)); };
    Eigen::VectorXd x(1);
    x << 0.0;
    CHECK_THROWS_AS(numerics::central_diff_grad(f, x, 1e-4), std::runtime_error);
}

TEST_CASE("central_diff_hessian: recovers a quadratic exactly") {
    Eigen::MatrixXd A(2, 2);
    A << 3.0, 0.5, 0.5, 1.5;
    auto f = [&](const Eigen::VectorXd& v) { return 0.5 * v.dot(A * v); };
    Eigen::VectorXd x(2);
    x << 0.4, -1.1;
    const Eigen::MatrixXd H = numerics::central_diff_hessian(f, x, 1e-4);
    CHECK((H - A).cwiseAbs().maxCoeff() < 1e-6);
}
