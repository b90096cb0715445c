#include "sip/artifact.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace sip::artifact {

namespace {

using nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
    const auto nr = static_cast<Eigen::Index>(rows.size());
    const auto nc = nr > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
    Eigen::MatrixXd m(nr, nc);
    for (Eigen::Index r = 0; r < nr; ++r)
        for (Eigen::Index c = 0; c < nc; ++c)
            m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
    return m;
}

}  // namespace

std::string to_json(const FitArtifact& artifact) {
    const auto& fit = artifact.fit;
    json doc;
    doc["schema_version"] = artifact.schema_version;
    doc["response"] = artifact.response;
    doc["columns"] = fit.columns;
    doc["theta_hat"] = vector_to_json(fit.theta_hat.theta);
    doc["theta_std"] = vector_to_json(fit.theta_std.theta);
    doc["transform"] = {{"d", fit.transform.d},
                        {"a", fit.transform.a},
                        {"center", vector_to_json(fit.transform.center)},
                        {"scale", vector_to_json(fit.transform.scale)}};
    doc["link"] = {{"order", fit.link.spec.order},
                   {"interior_knots", fit.link.spec.interior_knots},
                   {"coefficients", vector_to_json(fit.link.coefficients)},
                   {"rss", fit.link.rss}};
    doc["risk"] = fit.risk;
    doc["n"] = fit.n;
    doc["d"] = fit.d;
    doc["iterations"] = fit.iterations;
    doc["converged"] = fit.converged;
    if (artifact.covariance.has_value()) {
        const auto& cov = *artifact.covariance;
        doc["covariance"] = {{"hessian", matrix_to_json(cov.hessian)},
                             {"meat", matrix_to_json(cov.meat)},
                             {"sandwich", matrix_to_json(cov.sandwich)},
                             {"se", vector_to_json(cov.se)}};
    }
    const auto& cfg = artifact.config;
    doc["provenance"] = {
        {"input", artifact.input_path},
        {"seed", artifact.seed},
        {"config",
         {{"c1", cfg.c1},
          {"c2", cfg.c2},
          {"cap_c", cfg.cap_c},
          {"radius_quantile", cfg.radius_quantile},
          {"grad_tol", cfg.grad_tol},
          {"max_iter", cfg.max_iter},
          {"init", cfg.init == estimator::InitKind::last_axis ? "last_axis" : "ols"}}}};
    return doc.dump(2) + "\n";
}

FitArtifact from_json(const std::string& text) {
    const json doc = json::parse(text);
    FitArtifact artifact;
    artifact.schema_version = doc.at("schema_version").get<int>();
    if (artifact.schema_version != kSchemaVersion)
        throw std::runtime_error("artifact: unsupported schema version " +
                                 std::to_string(artifact.schema_version));
    artifact.response = doc.at("response").get<std::string>();
    auto& fit = artifact.fit;
    fit.columns = doc.at("columns").get<std::vector<std::string>>();
    fit.theta_hat.theta = vector_from_json(doc.at("theta_hat"));
    fit.theta_std.theta = vector_from_json(doc.at("theta_std"));
    const json& tf = doc.at("transform");
    fit.transform.d = tf.at("d").get<int>();
    fit.transform.a = tf.at("a").get<double>();
    fit.transform.center = vector_from_json(tf.at("center"));
    fit.transform.scale = vector_from_json(tf.at("scale"));
    const json& link = doc.at("link");
    fit.link.spec = splines::SplineBasisSpec(link.at("order").get<int>(),
                                             link.at("interior_knots").get<int>());
    fit.link.coefficients = vector_from_json(link.at("coefficients"));
    fit.link.rss = link.at("rss").get<double>();
    fit.risk = doc.at("risk").get<double>();
    fit.n = doc.at("n").get<Eigen::Index>();
    fit.d = doc.at("d").get<Eigen::Index>();
    fit.iterations = doc.at("iterations").get<int>();
    fit.converged = doc.at("converged").get<bool>();
    if (doc.contains("covariance")) {
        inference::CovarianceEstimate cov;
        const json& c = doc.at("covariance");
        cov.hessian = matrix_from_json(c.at("hessian"));
        cov.meat = matrix_from_json(c.at("meat"));
        cov.sandwich = matrix_from_json(c.at("sandwich"));
        cov.se = vector_from_json(c.at("se"));
        artifact.covariance = std::move(cov);
    }
    const json& prov = doc.at("provenance");
    artifact.input_path = prov.at("input").get<std::string>();
    artifact.seed = prov.at("seed").get<std::uint64_t>();
    const json& cfg = prov.at("config");
    artifact.config.c1 = cfg.at("c1").get<int>();
    artifact.config.c2 = cfg.at("c2").get<int>();
    artifact.config.cap_c = cfg.at("cap_c").get<double>();
    artifact.config.radius_quantile = cfg.at("radius_quantile").get<double>();
    artifact.config.grad_tol = cfg.at("grad_tol").get<double>();
    artifact.config.max_iter = cfg.at("max_iter").get<int>();
    artifact.config.init = cfg.at("init").get<std::string>() == "last_axis"
                               ? estimator::InitKind::last_axis
                               : estimator::InitKind::ols;
    return artifact;
}

void save(const FitArtifact& artifact, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("artifact: cannot write '" + path + "'");
    out << to_json(artifact);
}

FitArtifact load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("artifact: cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json(text);
}

}  // namespace sip::artifact
