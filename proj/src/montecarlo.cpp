#include "sip/montecarlo.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "sip/numerics.hpp"
#include "sip/rng.hpp"

namespace sip::montecarlo {

namespace {

std::vector<std::string> numbered_columns(int d) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(d));
    for (int j = 1; j <= d; ++j) names.push_back("x" + std::to_string(j));
    return names;
}

int replication_threads() {
    const char* env = std::getenv("SIP_THREADS");
    if (env == nullptr) return 1;
    const int v = std::atoi(env);
    return v > 1 ? v : 1;
}

}  // namespace

double example1_mean(double x1, double x2, int delta) {
    const double s = x1 + x2;
    return s + 4.0 * std::exp(-s * s) + delta * std::sqrt(x1 * x1 + x2 * x2);
}

Dataset gen_example1(int n, int delta, double sigma0, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("gen_example1: n must be positive");
    if (delta != 0 && delta != 1) throw std::invalid_argument("gen_example1: delta must be 0 or 1");
    rng::CounterRng gen = rng::CounterRng::substream(seed, 0);
    Dataset data;
    data.X.resize(n, 2);
    data.y.resize(n);
    data.columns = numbered_columns(2);
    for (int i = 0; i < n; ++i) {
        double x1, x2;
        do {  // truncation by rejection, conditional law on the square
            x1 = gen.normal();
            x2 = gen.normal();
        } while (std::fabs(x1) > 2.5 || std::fabs(x2) > 2.5);
        data.X(i, 0) = x1;
        data.X(i, 1) = x2;
        data.y(i) = example1_mean(x1, x2, delta) + sigma0 * gen.normal();
    }
    return data;
}

Dataset gen_example2(int n, int d, double sigma0, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("gen_example2: n must be positive");
    if (d < 3) throw std::invalid_argument("gen_example2: d must be >= 3");
    rng::CounterRng gen = rng::CounterRng::substream(seed, 0);
    const Eigen::VectorXd theta0 = example2_theta0(d);
    Dataset data;
    data.X.resize(n, d);
    data.y.resize(n);
    data.columns = numbered_columns(d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) data.X(i, j) = gen.normal();
        const double index = data.X.row(i) * theta0;
        const double m = std::sin(0.25 * M_PI * index);
        const double e = std::exp(data.X.row(i).norm() / std::sqrt(static_cast<double>(d)));
        const double sigma = sigma0 * (5.0 - e) / (5.0 + e);
        data.y(i) = m + sigma * gen.normal();
    }
    return data;
}

Eigen::VectorXd example1_theta0() {
    Eigen::VectorXd t(2);
    t << 1.0, 1.0;
    return t / std::sqrt(2.0);
}

Eigen::VectorXd example2_theta0(int d) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(d);
    t(0) = 1.0;
    t(1) = 1.0;
    t(d - 1) = 1.0;
    return t / std::sqrt(3.0);
}

Eigen::VectorXd generator_theta0(const GeneratorSpec& spec) {
    return spec.example == 1 ? example1_theta0() : example2_theta0(spec.d);
}

Dataset generate(const GeneratorSpec& spec, std::uint64_t seed) {
    if (spec.example == 1) return gen_example1(spec.n, spec.delta, spec.sigma0, seed);
    if (spec.example == 2) return gen_example2(spec.n, spec.d, spec.sigma0, seed);
    throw std::invalid_argument("generate: example must be 1 or 2");
}

McReport run_replications(const GeneratorSpec& spec, int R, const estimator::FitConfig& config,
                          std::uint64_t seed0) {
    if (R < 2) throw std::invalid_argument("run_replications: need R >= 2");
    const Eigen::VectorXd theta0 = generator_theta0(spec);
    const int d = static_cast<int>(theta0.size());

    Eigen::MatrixXd estimates(R, d);
    std::vector<char> ok(static_cast<std::size_t>(R), 0);

    auto run_one = [&](int r) {
        const Dataset data = generate(spec, seed0 + static_cast<std::uint64_t>(r));
        estimator::FitConfig cfg = config;
        if (cfg.init == estimator::InitKind::ols && data.d() >= data.n())
            cfg.init = estimator::InitKind::last_axis;
        try {
            const estimator::SipFit fit = estimator::fit_sip(data.X, data.y, cfg, data.columns);
            estimates.row(r) = fit.theta_hat.theta.transpose();
            ok[static_cast<std::size_t>(r)] = 1;
        } catch (const std::exception&) {
            ok[static_cast<std::size_t>(r)] = 0;
        }
    };

    const int threads = std::min(replication_threads(), R);
    if (threads <= 1) {
        for (int r = 0; r < R; ++r) run_one(r);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (int r = t; r < R; r += threads) run_one(r);
            });
        for (auto& th : pool) th.join();
    }

    McReport report;
    report.seed = seed0;
    report.theta_true = theta0;
    int kept = 0;
    report.theta_hats.resize(R, d);
    for (int r = 0; r < R; ++r)
        if (ok[static_cast<std::size_t>(r)]) report.theta_hats.row(kept++) = estimates.row(r);
    report.theta_hats.conservativeResize(kept, d);
    report.replications = kept;
    report.failures = R - kept;
    if (kept < 2) throw std::runtime_error("run_replications: fewer than 2 successful fits");

    report.bias.resize(d);
    report.sd.resize(d);
    report.mse.resize(d);
    for (int p = 0; p < d; ++p) {
        const Eigen::VectorXd col = report.theta_hats.col(p);
        const double mean = col.mean();
        report.bias(p) = mean - theta0(p);
        report.sd(p) = std::sqrt((col.array() - mean).square().sum() / (kept - 1));
        report.mse(p) = (col.array() - theta0(p)).square().mean();
    }
    report.average_mse = report.mse.mean();
    return report;
}

std::pair<Eigen::VectorXd, double>
rolling_forecast(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int split,
                 const estimator::FitConfig& config) {
    const Eigen::Index n = X.rows();
    if (split < 2 || split >= n)
        throw std::invalid_argument("rolling_forecast: split outside the series range");
    const estimator::SipFit fit =
        estimator::fit_sip(X.topRows(split), y.head(split), config, {});
    const Eigen::Index holdout = n - split;
    Eigen::VectorXd predictions(holdout);
    double sse = 0.0;
    for (Eigen::Index t = 0; t < holdout; ++t) {
        predictions(t) = estimator::predict(fit, X.row(split + t).transpose());
        const double err = y(split + t) - predictions(t);
        sse += err * err;
    }
    return {predictions, sse / static_cast<double>(holdout)};
}

std::pair<Eigen::VectorXd, double>
rolling_forecast_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int split) {
    const Eigen::Index n = X.rows();
    if (split < 2 || split >= n)
        throw std::invalid_argument("rolling_forecast_linear: split outside the series range");
    Eigen::MatrixXd design(split, X.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(X.cols()) = X.topRows(split);
    numerics::SpdSystem system{design.transpose() * design, design.transpose() * y.head(split),
                               0.0};
    const Eigen::VectorXd beta = numerics::solve_spd(system);
    const Eigen::Index holdout = n - split;
    Eigen::VectorXd predictions(holdout);
    double sse = 0.0;
    for (Eigen::Index t = 0; t < holdout; ++t) {
        predictions(t) = beta(0) + X.row(split + t).dot(beta.tail(X.cols()));
        const double err = y(split + t) - predictions(t);
        sse += err * err;
    }
    return {predictions, sse / static_cast<double>(holdout)};
}

IndexArSeries gen_index_ar_series(int n, std::uint64_t seed) {
    if (n < 10) throw std::invalid_argument("gen_index_ar_series: n too small");
    rng::CounterRng gen = rng::CounterRng::substream(seed, 0);
    const int burn = 100;
    const int total = n + burn;

    // Unit index direction over (y_lag1, y_lag2, x_t, z_t).
    Eigen::VectorXd theta0(4);
    theta0 << 0.25, 0.10, 0.80, -0.50;
    theta0.normalize();
    auto link = [](double v) { return v + 2.0 * std::exp(-v * v); };

    IndexArSeries s;
    Eigen::VectorXd y(total), x(total), z(total);
    double y1 = 0.0, y2 = 0.0, xprev = 0.0, zprev = 0.0;
    for (int t = 0; t < total; ++t) {
        x(t) = 0.5 * xprev + gen.normal();
        z(t) = 0.5 * zprev + gen.normal();
        const double index = theta0(0) * y1 + theta0(1) * y2 + theta0(2) * x(t) + theta0(3) * z(t);
        y(t) = link(index) + 0.3 * gen.normal();
        y2 = y1;
        y1 = y(t);
        xprev = x(t);
        zprev = z(t);
    }
    s.y = y.tail(n);
    s.x = x.tail(n);
    s.z = z.tail(n);
    return s;
}

Dataset gen_index_ar(int n, std::uint64_t seed) {
    const IndexArSeries s = gen_index_ar_series(n, seed);
    const int rows = n - 2;
    Dataset data;
    data.X.resize(rows, 4);
    data.y.resize(rows);
    data.columns = {"y_lag1", "y_lag2", "x_lag0", "z_lag0"};
    for (int t = 2; t < n; ++t) {
        data.X(t - 2, 0) = s.y(t - 1);
        data.X(t - 2, 1) = s.y(t - 2);
        data.X(t - 2, 2) = s.x(t);
        data.X(t - 2, 3) = s.z(t);
        data.y(t - 2) = s.y(t);
    }
    return data;
}

}  // namespace sip::montecarlo
