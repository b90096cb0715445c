#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "sip/dataset.hpp"
#include "sip/estimator.hpp"

namespace sip::modelselect {

/// Named candidate columns with rows already aligned (initial rows dropped
/// to accommodate the maximum lag).
struct CandidatePool {
    Eigen::MatrixXd design;
    Eigen::VectorXd response;
    std::vector<std::string> names;
};

struct SelectionResult {
    std::vector<std::string> chosen;
    std::vector<std::pair<std::string, double>> trace;  // model label -> BIC
    estimator::SipFit fit;
    double best_bic = 0.0;
};

struct SelectConfig {
    estimator::FitConfig fit;   // used for the final refit
    int selection_knots = 3;    // interior knots during the BIC search
    bool exhaustive = false;    // full subset scan, pools of <= 12 only
};

/// BIC = n*log(risk) + q*log(n), q = (N+4) + (d_subset - 1).
/// Throws std::runtime_error if risk is zero (degenerate perfect fit).
double bic(const estimator::SipFit& fit);

/// Builds the lagged pool from time-ordered series: response lags 1..max_lag
/// and each exogenous series at lags 0..max_lag.
CandidatePool build_lagged_pool(const Eigen::VectorXd& response, const std::string& response_name,
                                const std::vector<std::pair<std::string, Eigen::VectorXd>>& exogenous,
                                int max_lag);

/// Greedy forward selection followed by backward pruning, refitting the SIP
/// model with selection_knots interior knots at each step; ties broken
/// toward the smaller model, then lexicographic column order.
SelectionResult select_subset(const CandidatePool& pool, const SelectConfig& config);

}  // namespace sip::modelselect
