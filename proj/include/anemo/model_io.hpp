#pragma once

// Versioned JSON persistence for every fitted model kind. All documents
// carry format_version and tool_version; loaders validate the version and
// the document kind before any field access, and regression loads check
// column-name agreement before predicting.

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "anemo/copulas.hpp"
#include "anemo/error.hpp"
#include "anemo/joint.hpp"
#include "anemo/marginals.hpp"
#include "anemo/preprocess.hpp"
#include "anemo/regression.hpp"

namespace anemo {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kFormatVersion = 1;

using Json = nlohmann::ordered_json;

namespace io_detail {

inline Json header(const char* kind) {
    Json j;
    j["format_version"] = kFormatVersion;
    j["tool_version"] = kToolVersion;
    j["kind"] = kind;
    return j;
}

inline void check_header(const Json& j, const char* kind) {
    if (!j.contains("format_version") || !j["format_version"].is_number_integer())
        throw Error("model document: missing format_version");
    if (j["format_version"].get<int>() != kFormatVersion)
        throw Error("model document: unsupported format_version "
                    + std::to_string(j["format_version"].get<int>()));
    if (!j.contains("kind") || j["kind"].get<std::string>() != kind)
        throw Error(std::string("model document: expected kind '") + kind + "'");
}

}  // namespace io_detail

// ------------------------------------------------------------ regression

struct PersistedRegression {
    RegressionModel model;
    std::vector<std::string> column_names;   // predictor columns, in order
    std::string response;
    std::optional<ScalerParams> scaler;
};

inline Json to_json(const PersistedRegression& p) {
    Json j = io_detail::header("regression");
    j["model"] = {
        {"kind", to_string(p.model.kind)},
        {"intercept", p.model.intercept},
        {"coefficients", p.model.coefficients},
        {"hyperparams", p.model.hyperparams},
        {"iterations", p.model.iterations},
        {"converged", p.model.converged},
    };
    j["column_names"] = p.column_names;
    j["response"] = p.response;
    if (p.scaler) {
        j["scaler"] = {{"column_names", p.scaler->column_names},
                       {"mins", p.scaler->mins},
                       {"maxs", p.scaler->maxs}};
    }
    return j;
}

inline PersistedRegression regression_from_json(const Json& j) {
    io_detail::check_header(j, "regression");
    PersistedRegression p;
    const auto& m = j.at("model");
    p.model.kind = regressor_kind_from_string(m.at("kind").get<std::string>());
    p.model.intercept = m.at("intercept").get<double>();
    p.model.coefficients = m.at("coefficients").get<std::vector<double>>();
    p.model.hyperparams = m.at("hyperparams").get<std::map<std::string, double>>();
    p.model.iterations = m.value("iterations", std::size_t{0});
    p.model.converged = m.value("converged", true);
    p.column_names = j.at("column_names").get<std::vector<std::string>>();
    p.response = j.at("response").get<std::string>();
    if (j.contains("scaler")) {
        ScalerParams s;
        s.column_names = j["scaler"].at("column_names").get<std::vector<std::string>>();
        s.mins = j["scaler"].at("mins").get<std::vector<double>>();
        s.maxs = j["scaler"].at("maxs").get<std::vector<double>>();
        s.degenerate.assign(s.mins.size(), false);
        for (std::size_t i = 0; i < s.mins.size(); ++i)
            s.degenerate[i] = s.mins[i] == s.maxs[i];
        p.scaler = std::move(s);
    }
    if (p.model.coefficients.size() != p.column_names.size())
        throw Error("regression document: coefficient/column count mismatch");
    return p;
}

/// Validates that a dataset provides every predictor column the model was
/// trained on, returning the design matrix in training order.
inline Matrix design_for(const PersistedRegression& p, const Dataset& d) {
    Matrix X(d.n_rows(), p.column_names.size());
    for (std::size_t j = 0; j < p.column_names.size(); ++j) {
        if (!d.has_column(p.column_names[j]))
            throw DomainError("predict: input is missing column '" + p.column_names[j] + "'");
        const auto& col = d.column(p.column_names[j]);
        for (std::size_t i = 0; i < d.n_rows(); ++i) X(i, j) = col[i];
    }
    return X;
}

// -------------------------------------------------------------- marginal

inline Json to_json_fragment(const MarginalFit& f) {
    return Json{
        {"distribution", to_string(f.dist.kind)},
        {"params", {f.dist.p1, f.dist.p2}},
        {"loglik", f.loglik},
        {"aic", f.aic},
        {"bic", f.bic},
        {"std_errors", {f.se1, f.se2}},
        {"n", f.n},
    };
}

inline Json to_json(const MarginalFit& f) {
    Json j = io_detail::header("marginal");
    j["fit"] = to_json_fragment(f);
    return j;
}

inline MarginalFit marginal_from_fragment(const Json& j) {
    MarginalFit f;
    f.dist.kind = distribution_kind_from_string(j.at("distribution").get<std::string>());
    f.dist.p1 = j.at("params").at(0).get<double>();
    f.dist.p2 = j.at("params").at(1).get<double>();
    f.dist.validate();
    f.loglik = j.value("loglik", 0.0);
    f.aic = j.value("aic", 0.0);
    f.bic = j.value("bic", 0.0);
    if (j.contains("std_errors")) {
        f.se1 = j["std_errors"].at(0).get<double>();
        f.se2 = j["std_errors"].at(1).get<double>();
    }
    f.n = j.value("n", std::size_t{0});
    return f;
}

inline MarginalFit marginal_from_json(const Json& j) {
    io_detail::check_header(j, "marginal");
    return marginal_from_fragment(j.at("fit"));
}

// ---------------------------------------------------------------- copula

inline Json to_json_fragment(const CopulaFit& f) {
    Json j{
        {"family", to_string(f.spec.family)},
        {"rotation", f.spec.rotation == CopulaRotation::survival ? "survival" : "none"},
        {"theta", f.spec.theta},
    };
    if (is_two_parameter(f.spec.family)) j["delta"] = f.spec.delta;
    j["loglik"] = f.loglik;
    j["aic"] = f.aic;
    j["bic"] = f.bic;
    j["tau"] = f.tau;
    j["n"] = f.n;
    j["std_errors"] = {f.se_theta, f.se_delta};
    j["boundary_pinned"] = f.boundary_pinned;
    return j;
}

inline Json to_json(const CopulaFit& f) {
    Json j = io_detail::header("copula");
    j["fit"] = to_json_fragment(f);
    return j;
}

inline CopulaFit copula_from_fragment(const Json& j) {
    CopulaFit f;
    f.spec.family = copula_family_from_string(j.at("family").get<std::string>());
    const std::string rot = j.value("rotation", "none");
    if (rot == "survival") f.spec.rotation = CopulaRotation::survival;
    else if (rot != "none") throw Error("copula document: unknown rotation '" + rot + "'");
    f.spec.theta = j.value("theta", 0.0);
    f.spec.delta = j.value("delta", 0.0);
    f.spec.validate();
    f.loglik = j.value("loglik", 0.0);
    f.aic = j.value("aic", 0.0);
    f.bic = j.value("bic", 0.0);
    f.tau = j.value("tau", 0.0);
    f.n = j.value("n", std::size_t{0});
    if (j.contains("std_errors")) {
        f.se_theta = j["std_errors"].at(0).get<double>();
        f.se_delta = j["std_errors"].at(1).get<double>();
    }
    f.boundary_pinned = j.value("boundary_pinned", false);
    return f;
}

inline CopulaFit copula_from_json(const Json& j) {
    io_detail::check_header(j, "copula");
    return copula_from_fragment(j.at("fit"));
}

// ----------------------------------------------------------------- joint

inline Json to_json(const JointModel& m) {
    Json j = io_detail::header("joint");
    j["labels"] = {m.label_1, m.label_2};
    j["margin_1"] = to_json_fragment(m.marginal_1);
    j["margin_2"] = to_json_fragment(m.marginal_2);
    j["copula"] = to_json_fragment(m.copula);
    return j;
}

inline JointModel joint_from_json(const Json& j) {
    io_detail::check_header(j, "joint");
    JointModel m;
    m.label_1 = j.at("labels").at(0).get<std::string>();
    m.label_2 = j.at("labels").at(1).get<std::string>();
    m.marginal_1 = marginal_from_fragment(j.at("margin_1"));
    m.marginal_2 = marginal_from_fragment(j.at("margin_2"));
    m.copula = copula_from_fragment(j.at("copula"));
    return m;
}

// ------------------------------------------------------------- file I/O

inline void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed JSON in '" + path + "': " + e.what());
    }
    return j;
}

}  // namespace anemo
