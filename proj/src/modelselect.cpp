#include "sip/modelselect.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace sip::modelselect {

namespace {

std::string model_label(const CandidatePool& pool, const std::vector<int>& cols) {
    std::string label;
    for (std::size_t k = 0; k < cols.size(); ++k) {
        if (k > 0) label += '+';
        label += pool.names[static_cast<std::size_t>(cols[k])];
    }
    return label;
}

Eigen::MatrixXd subset_design(const CandidatePool& pool, const std::vector<int>& cols) {
    Eigen::MatrixXd X(pool.design.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k)
        X.col(static_cast<Eigen::Index>(k)) = pool.design.col(cols[k]);
    return X;
}

std::vector<std::string> subset_names(const CandidatePool& pool, const std::vector<int>& cols) {
    std::vector<std::string> names;
    names.reserve(cols.size());
    for (int c : cols) names.push_back(pool.names[static_cast<std::size_t>(c)]);
    return names;
}

// Candidate order used for tie-breaking: lexicographic by column name.
std::vector<int> lexicographic_order(const CandidatePool& pool) {
    std::vector<int> order(pool.names.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return pool.names[a] < pool.names[b]; });
    return order;
}

}  // namespace

double bic(const estimator::SipFit& fit) {
    if (!(fit.risk > 0.0)) throw std::runtime_error("bic: zero risk (degenerate perfect fit)");
    const double n = static_cast<double>(fit.n);
    const double q = (fit.link.spec.interior_knots + 4) + (static_cast<double>(fit.d) - 1.0);
    return n * std::log(fit.risk) + q * std::log(n);
}

CandidatePool build_lagged_pool(const Eigen::VectorXd& response, const std::string& response_name,
                                const std::vector<std::pair<std::string, Eigen::VectorXd>>& exogenous,
                                int max_lag) {
    const Eigen::Index T = response.size();
    if (max_lag < 1) throw std::invalid_argument("build_lagged_pool: max_lag must be >= 1");
    if (T <= max_lag) throw std::invalid_argument("build_lagged_pool: max_lag exceeds series length");
    for (const auto& [name, series] : exogenous)
        if (series.size() != T)
            throw std::invalid_argument("build_lagged_pool: series '" + name + "' length mismatch");

    const Eigen::Index rows = T - max_lag;
    CandidatePool pool;
    pool.response = response.tail(rows);
    std::vector<Eigen::VectorXd> cols;
    for (int lag = 1; lag <= max_lag; ++lag) {
        pool.names.push_back(response_name + "_lag" + std::to_string(lag));
        cols.push_back(response.segment(max_lag - lag, rows));
    }
    for (const auto& [name, series] : exogenous) {
        for (int lag = 0; lag <= max_lag; ++lag) {
            pool.names.push_back(name + "_lag" + std::to_string(lag));
            cols.push_back(series.segment(max_lag - lag, rows));
        }
    }
    pool.design.resize(rows, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k)
        pool.design.col(static_cast<Eigen::Index>(k)) = cols[k];

    std::set<std::string> unique(pool.names.begin(), pool.names.end());
    if (unique.size() != pool.names.size())
        throw std::invalid_argument("build_lagged_pool: duplicate column names");
    return pool;
}

SelectionResult select_subset(const CandidatePool& pool, const SelectConfig& config) {
    const std::size_t P = pool.names.size();
    if (P == 0) throw std::invalid_argument("select_subset: empty candidate pool");

    // Selection-phase fits pin the interior knot count by making both knot
    // rule constants equal to it.
    estimator::FitConfig sel_cfg = config.fit;
    sel_cfg.c1 = config.selection_knots;
    sel_cfg.c2 = config.selection_knots;

    SelectionResult result;
    auto try_bic = [&](const std::vector<int>& cols, double& out) -> bool {
        try {
            const estimator::SipFit f = estimator::fit_sip(
                subset_design(pool, cols), pool.response, sel_cfg, subset_names(pool, cols));
            out = bic(f);
            return true;
        } catch (const std::exception&) {
            return false;
        }
    };

    const std::vector<int> order = lexicographic_order(pool);
    std::vector<int> chosen;
    double current = std::numeric_limits<double>::infinity();

    if (config.exhaustive) {
        if (P > 12) throw std::invalid_argument("select_subset: exhaustive mode limited to 12 candidates");
        // Subsets scanned by increasing size, lexicographic within size, so
        // the first strict improvement realizes the tie-break rule.
        std::vector<std::vector<int>> by_size[13];
        for (unsigned mask = 1; mask < (1u << P); ++mask) {
            std::vector<int> cols;
            for (int j : order)
                if (mask & (1u << j)) cols.push_back(j);
            by_size[cols.size()].push_back(std::move(cols));
        }
        for (std::size_t size = 1; size <= P; ++size) {
            for (auto& cols : by_size[size]) {
                double b;
                if (!try_bic(cols, b)) {
                    result.trace.emplace_back("skipped:" + model_label(pool, cols),
                                              std::numeric_limits<double>::quiet_NaN());
                    continue;
                }
                result.trace.emplace_back(model_label(pool, cols), b);
                if (b < current) {
                    current = b;
                    chosen = cols;
                }
            }
        }
    } else {
        // Forward additions: strict improvement required.
        while (chosen.size() < P) {
            int best_col = -1;
            double best_bic = current;
            for (int j : order) {
                if (std::find(chosen.begin(), chosen.end(), j) != chosen.end()) continue;
                std::vector<int> cols = chosen;
                cols.push_back(j);
                std::sort(cols.begin(), cols.end());
                double b;
                if (!try_bic(cols, b)) {
                    result.trace.emplace_back("skipped:" + model_label(pool, cols),
                                              std::numeric_limits<double>::quiet_NaN());
                    continue;
                }
                result.trace.emplace_back(model_label(pool, cols), b);
                if (b < best_bic) {
                    best_bic = b;
                    best_col = j;
                }
            }
            if (best_col < 0) break;
            chosen.push_back(best_col);
            std::sort(chosen.begin(), chosen.end());
            current = best_bic;
        }
        // Backward pruning: ties resolved toward the smaller model.
        bool removed = true;
        while (removed && chosen.size() > 1) {
            removed = false;
            int best_col = -1;
            double best_bic = current;
            for (int j : order) {
                if (std::find(chosen.begin(), chosen.end(), j) == chosen.end()) continue;
                std::vector<int> cols;
                for (int c : chosen)
                    if (c != j) cols.push_back(c);
                double b;
                if (!try_bic(cols, b)) continue;
                result.trace.emplace_back(model_label(pool, cols), b);
                if (b <= best_bic && (best_col < 0 || b < best_bic)) {
                    best_bic = b;
                    best_col = j;
                }
            }
            if (best_col >= 0) {
                chosen.erase(std::remove(chosen.begin(), chosen.end(), best_col), chosen.end());
                current = best_bic;
                removed = true;
            }
        }
    }

    if (chosen.empty())
        throw std::runtime_error("select_subset: no candidate model could be fitted");
    result.chosen = subset_names(pool, chosen);
    result.best_bic = current;
    result.fit = estimator::fit_sip(subset_design(pool, chosen), pool.response, config.fit,
                                    result.chosen);
    return result;
}

}  // namespace sip::modelselect
