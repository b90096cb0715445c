#pragma once

#include <optional>
#include <string>

#include "sip/estimator.hpp"
#include "sip/inference.hpp"

namespace sip::artifact {

inline constexpr int kSchemaVersion = 1;

/// Serializable model document: everything needed to reproduce predictions,
/// plus provenance (input path, seed, fit configuration).  Round-trips
/// losslessly (read(write(x)) == x).
struct FitArtifact {
    int schema_version = kSchemaVersion;
    estimator::SipFit fit;
    std::string response;
    std::optional<inference::CovarianceEstimate> covariance;
    std::string input_path;
    std::uint64_t seed = 0;
    estimator::FitConfig config;
};

/// JSON text with sorted keys and shortest round-trip floats; byte-stable
/// for identical inputs.
std::string to_json(const FitArtifact& artifact);

FitArtifact from_json(const std::string& text);

void save(const FitArtifact& artifact, const std::string& path);
FitArtifact load(const std::string& path);

}  // namespace sip::artifact
