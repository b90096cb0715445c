#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace sip {

/// Predictor matrix (n x d) with response vector (n) and predictor column names.
/// Immutable by convention: fitting routines take it by const reference.
struct Dataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<std::string> columns;

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index d() const { return X.cols(); }
};

}  // namespace sip
