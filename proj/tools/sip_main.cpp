#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sip/artifact.hpp"
#include "sip/csv.hpp"
#include "sip/estimator.hpp"
#include "sip/inference.hpp"
#include "sip/modelselect.hpp"
#include "sip/montecarlo.hpp"
#include "sip/transform.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 2;
constexpr int kExitFitFailure = 3;

using sip::csv::format_double;

int column_index(const std::vector<std::string>& header, const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

struct SplitDesign {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<std::string> names;
};

SplitDesign split_response(const sip::csv::Table& table, const std::string& response) {
    const int ry = column_index(table.header, response);
    if (ry < 0) throw std::invalid_argument("response column '" + response + "' not found");
    if (table.header.size() < 2) throw std::invalid_argument("no predictor columns in input");
    SplitDesign out;
    out.y = table.values.col(ry);
    out.X.resize(table.values.rows(), table.values.cols() - 1);
    Eigen::Index c = 0;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (static_cast<int>(j) == ry) continue;
        out.X.col(c++) = table.values.col(static_cast<Eigen::Index>(j));
        out.names.push_back(table.header[j]);
    }
    return out;
}

std::vector<std::string> parse_name_list(const std::string& csv_list) {
    std::vector<std::string> names;
    std::stringstream ss(csv_list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) names.push_back(item);
    }
    return names;
}

// Lag-name grammar used by select/forecast outputs: <base>_lag<k>.
struct LagRef {
    std::string base;
    int lag = 0;
};

LagRef parse_lag_name(const std::string& name) {
    const auto pos = name.rfind("_lag");
    if (pos == std::string::npos || pos + 4 >= name.size())
        throw std::invalid_argument("model column '" + name + "' is not of the form <name>_lag<k>");
    LagRef ref;
    ref.base = name.substr(0, pos);
    try {
        ref.lag = std::stoi(name.substr(pos + 4));
    } catch (const std::exception&) {
        throw std::invalid_argument("model column '" + name + "' has a malformed lag suffix");
    }
    if (ref.lag < 0) throw std::invalid_argument("model column '" + name + "' has a negative lag");
    return ref;
}

void print_fit_summary(std::ostream& os, const sip::estimator::SipFit& fit,
                       const std::optional<sip::inference::CovarianceEstimate>& cov) {
    os << "theta_hat:\n";
    for (Eigen::Index j = 0; j < fit.d; ++j) {
        const std::string name =
            j < static_cast<Eigen::Index>(fit.columns.size()) ? fit.columns[j]
                                                              : "x" + std::to_string(j + 1);
        os << "  " << name << " = " << format_double(fit.theta_hat.theta(j)) << "\n";
    }
    os << "risk = " << format_double(fit.risk) << "\n";
    os << "interior_knots = " << fit.link.spec.interior_knots << "\n";
    os << "iterations = " << fit.iterations << "\n";
    os << "converged = " << (fit.converged ? "yes" : "no") << "\n";
    if (cov.has_value()) {
        os << "se (free coordinates):\n";
        for (Eigen::Index j = 0; j < cov->se.size(); ++j) {
            const std::string name =
                j < static_cast<Eigen::Index>(fit.columns.size()) ? fit.columns[j]
                                                                  : "x" + std::to_string(j + 1);
            os << "  " << name << " = " << format_double(cov->se(j)) << "\n";
        }
    }
}

int cmd_fit(const std::string& input, const std::string& response, int c1, int c2, double cap_c,
            double radius_q, const std::string& init, bool with_se, const std::string& out) {
    sip::csv::Table table;
    SplitDesign design;
    try {
        table = sip::csv::read_table(input);
        design = split_response(table, response);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }

    sip::estimator::FitConfig config;
    config.c1 = c1;
    config.c2 = c2;
    config.cap_c = cap_c;
    config.radius_quantile = radius_q;
    if (init == "last_axis")
        config.init = sip::estimator::InitKind::last_axis;
    else if (init == "ols")
        config.init = sip::estimator::InitKind::ols;
    else  // auto: least-squares start needs d < n
        config.init = design.X.cols() < design.X.rows() ? sip::estimator::InitKind::ols
                                                        : sip::estimator::InitKind::last_axis;

    sip::artifact::FitArtifact artifact;
    artifact.response = response;
    artifact.input_path = input;
    artifact.config = config;
    try {
        artifact.fit = sip::estimator::fit_sip(design.X, design.y, config, design.names);
        if (with_se) {
            sip::Dataset data{design.X, design.y, design.names};
            artifact.covariance = sip::inference::covariance(data, artifact.fit);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "fit failed: " << e.what() << "\n";
        return kExitFitFailure;
    }

    try {
        sip::artifact::save(artifact, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    print_fit_summary(std::cout, artifact.fit, artifact.covariance);
    if (!artifact.fit.converged)
        std::cerr << "warning: optimizer stopped before reaching the gradient tolerance\n";
    return kExitOk;
}

int cmd_predict(const std::string& model, const std::string& input, const std::string& out) {
    sip::artifact::FitArtifact artifact;
    sip::csv::Table table;
    try {
        artifact = sip::artifact::load(model);
        table = sip::csv::read_table(input);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }

    std::vector<int> order;
    std::vector<std::string> missing, extra;
    for (const auto& name : artifact.fit.columns) {
        const int idx = column_index(table.header, name);
        if (idx < 0)
            missing.push_back(name);
        else
            order.push_back(idx);
    }
    for (const auto& name : table.header) {
        const bool used = std::find(artifact.fit.columns.begin(), artifact.fit.columns.end(),
                                    name) != artifact.fit.columns.end();
        if (!used && name != artifact.response) extra.push_back(name);
    }
    if (!missing.empty() || !extra.empty()) {
        std::cerr << "error: column mismatch against the model artifact\n";
        for (const auto& m : missing) std::cerr << "  missing: " << m << "\n";
        for (const auto& e : extra) std::cerr << "  extra: " << e << "\n";
        return kExitBadInput;
    }

    sip::csv::Table result;
    result.header = {"prediction"};
    result.values.resize(table.values.rows(), 1);
    try {
        for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
            Eigen::VectorXd x(artifact.fit.d);
            for (std::size_t j = 0; j < order.size(); ++j)
                x(static_cast<Eigen::Index>(j)) = table.values(r, order[j]);
            result.values(r, 0) = sip::estimator::predict(artifact.fit, x);
        }
        sip::csv::write_table(out, result);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFitFailure;
    }
    std::cout << "wrote " << result.values.rows() << " predictions to " << out << "\n";
    return kExitOk;
}

int cmd_simulate(int example, int n, int d, int delta, double sigma0, int reps,
                 std::uint64_t seed, const std::string& out) {
    if (example != 1 && example != 2) {
        std::cerr << "error: --example must be 1 or 2\n";
        return kExitBadInput;
    }
    if (example == 1 && d != 2) {
        std::cerr << "error: example 1 is bivariate, --d must be 2\n";
        return kExitBadInput;
    }
    if (example == 1 && delta != 0 && delta != 1) {
        std::cerr << "error: --delta must be 0 or 1\n";
        return kExitBadInput;
    }
    if (example == 2 && d < 3) {
        std::cerr << "error: example 2 requires --d >= 3\n";
        return kExitBadInput;
    }
    if (example == 2 && delta != 0) {
        std::cerr << "error: --delta applies to example 1 only\n";
        return kExitBadInput;
    }
    if (reps < 2) {
        std::cerr << "error: --reps must be >= 2\n";
        return kExitBadInput;
    }

    sip::montecarlo::GeneratorSpec spec;
    spec.example = example;
    spec.n = n;
    spec.d = example == 1 ? 2 : d;
    spec.delta = delta;
    spec.sigma0 = sigma0;

    sip::montecarlo::McReport report;
    try {
        report = sip::montecarlo::run_replications(spec, reps, sip::estimator::FitConfig{}, seed);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "simulation failed: " << e.what() << "\n";
        return kExitFitFailure;
    }

    std::ofstream os(out, std::ios::binary);
    if (!os) {
        std::cerr << "error: cannot write '" << out << "'\n";
        return kExitBadInput;
    }
    os << "coordinate,bias,sd,mse,average_mse,replications,failures\n";
    for (Eigen::Index p = 0; p < report.bias.size(); ++p) {
        os << "theta_" << (p + 1) << ',' << format_double(report.bias(p)) << ','
           << format_double(report.sd(p)) << ',' << format_double(report.mse(p)) << ','
           << format_double(report.average_mse) << ',' << report.replications << ','
           << report.failures << '\n';
    }
    std::cout << "average MSE = " << format_double(report.average_mse) << " over "
              << report.replications << " replications (" << report.failures << " failures)\n";
    return kExitOk;
}

int cmd_select(const std::string& input, const std::string& response, int max_lag,
               const std::string& exogenous_list, bool detrend, int knots, bool exhaustive,
               const std::string& out) {
    sip::csv::Table table;
    sip::modelselect::CandidatePool pool;
    try {
        table = sip::csv::read_table(input);
        const int ry = column_index(table.header, response);
        if (ry < 0) throw std::invalid_argument("response column '" + response + "' not found");

        std::vector<std::string> exo_names = parse_name_list(exogenous_list);
        if (exo_names.empty()) {
            for (const auto& h : table.header)
                if (h != response) exo_names.push_back(h);
        }
        Eigen::VectorXd y = table.values.col(ry);
        std::vector<std::pair<std::string, Eigen::VectorXd>> exo;
        for (const auto& name : exo_names) {
            const int idx = column_index(table.header, name);
            if (idx < 0) throw std::invalid_argument("exogenous column '" + name + "' not found");
            exo.emplace_back(name, table.values.col(idx));
        }
        if (detrend) {
            y = sip::transform::detrend_quadratic_spline(y).first;
            for (auto& [name, series] : exo)
                series = sip::transform::detrend_quadratic_spline(series).first;
        }
        pool = sip::modelselect::build_lagged_pool(y, response, exo, max_lag);
        const Eigen::Index min_rows = knots + 4 + 2;
        if (pool.design.rows() < min_rows)
            throw std::invalid_argument("too few rows after lag alignment for a fit");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }

    sip::modelselect::SelectConfig config;
    config.selection_knots = knots;
    config.exhaustive = exhaustive;
    sip::modelselect::SelectionResult result;
    try {
        result = sip::modelselect::select_subset(pool, config);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "selection failed: " << e.what() << "\n";
        return kExitFitFailure;
    }

    sip::artifact::FitArtifact artifact;
    artifact.fit = result.fit;
    artifact.response = response;
    artifact.input_path = input;
    artifact.config = config.fit;
    nlohmann::json doc = nlohmann::json::parse(sip::artifact::to_json(artifact));
    doc["chosen"] = result.chosen;
    doc["best_bic"] = result.best_bic;
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& [label, value] : result.trace)
        trace.push_back({{"model", label}, {"bic", value}});
    doc["bic_trace"] = trace;
    std::ofstream os(out, std::ios::binary);
    if (!os) {
        std::cerr << "error: cannot write '" << out << "'\n";
        return kExitBadInput;
    }
    os << doc.dump(2) << "\n";

    std::cout << "chosen predictors:";
    for (const auto& name : result.chosen) std::cout << ' ' << name;
    std::cout << "\nBIC = " << format_double(result.best_bic) << "\n";
    return kExitOk;
}

int cmd_forecast(const std::string& input, const std::string& response, int split,
                 const std::string& model_cols, bool linear, const std::string& out) {
    sip::csv::Table table;
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    int max_lag = 0;
    int aligned_split = 0;
    try {
        table = sip::csv::read_table(input);
        const int ry = column_index(table.header, response);
        if (ry < 0) throw std::invalid_argument("response column '" + response + "' not found");
        const std::vector<std::string> names = parse_name_list(model_cols);
        if (names.empty()) throw std::invalid_argument("--model-cols must name at least one column");

        const Eigen::Index T = table.values.rows();
        std::vector<LagRef> refs;
        for (const auto& name : names) {
            LagRef ref = parse_lag_name(name);
            if (ref.base == response && ref.lag < 1)
                throw std::invalid_argument("response lags must be >= 1 in '" + name + "'");
            if (column_index(table.header, ref.base) < 0)
                throw std::invalid_argument("series '" + ref.base + "' not found for '" + name + "'");
            max_lag = std::max(max_lag, ref.lag);
            refs.push_back(std::move(ref));
        }
        if (T <= max_lag + 1) throw std::invalid_argument("series too short for the requested lags");
        const Eigen::Index rows = T - max_lag;
        X.resize(rows, static_cast<Eigen::Index>(refs.size()));
        for (std::size_t j = 0; j < refs.size(); ++j) {
            const Eigen::VectorXd base =
                table.values.col(column_index(table.header, refs[j].base));
            X.col(static_cast<Eigen::Index>(j)) = base.segment(max_lag - refs[j].lag, rows);
        }
        y = table.values.col(ry).tail(rows);
        aligned_split = split - max_lag;
        if (split <= max_lag || split >= T)
            throw std::invalid_argument("--split outside the forecastable range");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }

    Eigen::VectorXd predictions;
    double mspe = 0.0;
    try {
        if (linear) {
            std::tie(predictions, mspe) =
                sip::montecarlo::rolling_forecast_linear(X, y, aligned_split);
        } else {
            std::tie(predictions, mspe) =
                sip::montecarlo::rolling_forecast(X, y, aligned_split, sip::estimator::FitConfig{});
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "forecast failed: " << e.what() << "\n";
        return kExitFitFailure;
    }

    sip::csv::Table result;
    result.header = {"row", "actual", "prediction", "error"};
    result.values.resize(predictions.size(), 4);
    for (Eigen::Index t = 0; t < predictions.size(); ++t) {
        result.values(t, 0) = static_cast<double>(split + t);
        result.values(t, 1) = y(aligned_split + t);
        result.values(t, 2) = predictions(t);
        result.values(t, 3) = y(aligned_split + t) - predictions(t);
    }
    try {
        sip::csv::write_table(out, result);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    std::cout << "MSPE = " << format_double(mspe) << " over " << predictions.size()
              << " forecasts\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-index prediction model: fit, predict, simulate, select, forecast"};
    app.require_subcommand(1);

    // fit
    std::string fit_input, fit_response, fit_out = "fit.json", fit_init = "auto";
    int fit_c1 = 1, fit_c2 = 5;
    double fit_cap = 0.995, fit_radius_q = 0.95;
    bool fit_se = false;
    auto* fit = app.add_subcommand("fit", "Fit the SIP model to a CSV file");
    fit->add_option("--input", fit_input)->required();
    fit->add_option("--response", fit_response)->required();
    fit->add_option("--c1", fit_c1);
    fit->add_option("--c2", fit_c2);
    fit->add_option("--cap-c", fit_cap);
    fit->add_option("--radius-q", fit_radius_q);
    fit->add_option("--init", fit_init)->check(CLI::IsMember({"auto", "ols", "last_axis"}));
    fit->add_flag("--se", fit_se, "also compute sandwich standard errors");
    fit->add_option("--out", fit_out);

    // predict
    std::string pred_model, pred_input, pred_out = "predictions.csv";
    auto* predict = app.add_subcommand("predict", "Predict new rows from a saved model");
    predict->add_option("--model", pred_model)->required();
    predict->add_option("--input", pred_input)->required();
    predict->add_option("--out", pred_out);

    // simulate
    int sim_example = 1, sim_n = 100, sim_d = 2, sim_delta = 0, sim_reps = 100;
    double sim_sigma0 = 0.3;
    std::uint64_t sim_seed = 1;
    std::string sim_out = "simulation.csv";
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo replication tables");
    simulate->add_option("--example", sim_example);
    simulate->add_option("--n", sim_n);
    simulate->add_option("--d", sim_d);
    simulate->add_option("--delta", sim_delta);
    simulate->add_option("--sigma0", sim_sigma0);
    simulate->add_option("--reps", sim_reps);
    simulate->add_option("--seed", sim_seed);
    simulate->add_option("--out", sim_out);

    // select
    std::string sel_input, sel_response, sel_exo, sel_out = "selection.json";
    int sel_max_lag = 7, sel_knots = 3;
    bool sel_detrend = false, sel_exhaustive = false;
    auto* select = app.add_subcommand("select", "BIC subset selection over lagged predictors");
    select->add_option("--input", sel_input)->required();
    select->add_option("--response", sel_response)->required();
    select->add_option("--max-lag", sel_max_lag);
    select->add_option("--exogenous", sel_exo, "comma-separated series names");
    select->add_flag("--detrend", sel_detrend, "quadratic-spline detrend before pooling");
    select->add_option("--knots", sel_knots);
    select->add_flag("--exhaustive", sel_exhaustive);
    select->add_option("--out", sel_out);

    // forecast
    std::string fc_input, fc_response, fc_cols, fc_out = "forecast.csv";
    int fc_split = 0;
    bool fc_linear = false;
    auto* forecast = app.add_subcommand("forecast", "Out-of-sample rolling forecast");
    forecast->add_option("--input", fc_input)->required();
    forecast->add_option("--response", fc_response)->required();
    forecast->add_option("--split", fc_split)->required();
    forecast->add_option("--model-cols", fc_cols)->required();
    forecast->add_flag("--linear", fc_linear, "linear regression baseline");
    forecast->add_option("--out", fc_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadInput;
    }

    if (fit->parsed())
        return cmd_fit(fit_input, fit_response, fit_c1, fit_c2, fit_cap, fit_radius_q, fit_init,
                       fit_se, fit_out);
    if (predict->parsed()) return cmd_predict(pred_model, pred_input, pred_out);
    if (simulate->parsed())
        return cmd_simulate(sim_example, sim_n, sim_d, sim_delta, sim_sigma0, sim_reps, sim_seed,
                            sim_out);
    if (select->parsed())
        return cmd_select(sel_input, sel_response, sel_max_lag, sel_exo, sel_detrend, sel_knots,
                          sel_exhaustive, sel_out);
    if (forecast->parsed())
        return cmd_forecast(fc_input, fc_response, fc_split, fc_cols, fc_linear, fc_out);
    return kExitBadInput;
}
