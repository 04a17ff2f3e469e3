#include "itgp/model_io.hpp"

#include "itgp/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <string>
#include <vector>

namespace itgp {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "itgp-model";
constexpr int kVersion = 1;

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vector_from_json(const json& arr, const std::string& field) {
    if (!arr.is_array()) throw ModelError("field '" + field + "' must be an array");
    Eigen::VectorXd v(arr.size());
    Eigen::Index i = 0;
    for (const auto& item : arr) {
        if (!item.is_number()) throw ModelError("field '" + field + "' must be numeric");
        v[i++] = item.get<double>();
    }
    return v;
}

json gp_to_json(const TrainedGP& gp) {
    json j;
    j["kernel"] = to_string(gp.spec.family);
    j["params"] = {{"log_signal_sd", gp.params.log_signal_sd},
                   {"log_lengthscale", gp.params.log_lengthscale},
                   {"log_noise_sd", gp.params.log_noise_sd}};
    j["mean_const"] = gp.mean_const;
    j["train_x"] = vector_to_json(gp.train_x);
    j["train_y"] = vector_to_json(gp.train_y);
    return j;
}

double require_number(const json& j, const std::string& field) {
    if (!j.contains(field) || !j[field].is_number()) {
        throw ModelError("missing or non-numeric field '" + field + "'");
    }
    return j[field].get<double>();
}

TrainedGP gp_from_json(const json& j) {
    if (!j.contains("kernel") || !j["kernel"].is_string()) {
        throw ModelError("missing kernel family");
    }
    KernelSpec spec;
    try {
        spec.family = kernel_family_from_string(j["kernel"].get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ModelError(e.what());
    }
    if (!j.contains("params")) throw ModelError("missing field 'params'");
    const json& p = j["params"];
    KernelParams params;
    params.log_signal_sd = require_number(p, "log_signal_sd");
    params.log_lengthscale = require_number(p, "log_lengthscale");
    params.log_noise_sd = require_number(p, "log_noise_sd");
    const double mean_const = require_number(j, "mean_const");

    if (!j.contains("train_x") || !j.contains("train_y")) {
        throw ModelError("missing training arrays");
    }
    const Eigen::VectorXd x = vector_from_json(j["train_x"], "train_x");
    const Eigen::VectorXd y = vector_from_json(j["train_y"], "train_y");
    if (x.size() != y.size() || x.size() < 1) {
        throw ModelError("training arrays must be nonempty and of equal length");
    }
    try {
        return train_with_params(spec, params, mean_const, x, y);
    } catch (const std::invalid_argument& e) {
        throw ModelError(e.what());
    }
}

void write_document(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::vector<std::size_t> indices_from_json(const json& arr, const std::string& field) {
    if (!arr.is_array()) throw ModelError("field '" + field + "' must be an array");
    std::vector<std::size_t> out;
    out.reserve(arr.size());
    for (const auto& item : arr) {
        if (!item.is_number_unsigned()) {
            throw ModelError("field '" + field + "' must hold nonnegative integers");
        }
        out.push_back(item.get<std::size_t>());
    }
    return out;
}

} // namespace

void save_model(const TrainedGP& gp, const std::string& path) {
    json j = gp_to_json(gp);
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["type"] = "gp";
    write_document(j, path);
}

void save_model(const ITGPResult& result, const std::string& path) {
    json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["type"] = "itgp";
    j["gp"] = gp_to_json(result.gp);
    j["c"] = result.c;
    j["inliers"] = result.inliers;
    j["scaled_residuals"] = vector_to_json(result.scaled_residuals);
    j["n_iterations"] = result.n_iterations;
    j["converged"] = result.converged;
    j["reweighted"] = result.reweighted;
    j["reweight_fallback"] = result.reweight_fallback;
    j["selection_sizes"] = result.selection_sizes;
    write_document(j, path);
}

ModelDocument load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open model file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ModelError(std::string("corrupt model JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("format") || j["format"] != kFormat) {
        throw ModelError("not a model document (missing format marker)");
    }
    if (!j.contains("version") || !j["version"].is_number_integer() ||
        j["version"].get<int>() != kVersion) {
        throw ModelError("unsupported model document version");
    }
    const std::string type = j.value("type", "");
    ModelDocument doc;
    if (type == "gp") {
        doc.gp = gp_from_json(j);
        return doc;
    }
    if (type == "itgp") {
        if (!j.contains("gp")) throw ModelError("missing embedded gp document");
        doc.is_itgp = true;
        doc.itgp.gp = gp_from_json(j["gp"]);
        doc.itgp.c = require_number(j, "c");
        if (!(doc.itgp.c > 0.0)) throw ModelError("consistency factor must be positive");
        if (!j.contains("inliers")) throw ModelError("missing field 'inliers'");
        doc.itgp.inliers = indices_from_json(j["inliers"], "inliers");
        if (!j.contains("scaled_residuals")) throw ModelError("missing field 'scaled_residuals'");
        doc.itgp.scaled_residuals = vector_from_json(j["scaled_residuals"], "scaled_residuals");
        if (!j.contains("n_iterations") || !j["n_iterations"].is_number_unsigned()) {
            throw ModelError("missing or invalid field 'n_iterations'");
        }
        doc.itgp.n_iterations = j["n_iterations"].get<std::size_t>();
        if (!j.contains("converged") || !j["converged"].is_boolean() ||
            !j.contains("reweighted") || !j["reweighted"].is_boolean()) {
            throw ModelError("missing status flags");
        }
        doc.itgp.converged = j["converged"].get<bool>();
        doc.itgp.reweighted = j["reweighted"].get<bool>();
        doc.itgp.reweight_fallback = j.value("reweight_fallback", false);
        if (j.contains("selection_sizes")) {
            doc.itgp.selection_sizes = indices_from_json(j["selection_sizes"], "selection_sizes");
        }
        doc.gp = doc.itgp.gp;
        return doc;
    }
    throw ModelError("unknown model document type '" + type + "'");
}

} // namespace itgp
