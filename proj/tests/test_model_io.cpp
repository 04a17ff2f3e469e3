#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "itgp/datasets.hpp"
#include "itgp/errors.hpp"
#include "itgp/gp.hpp"
#include "itgp/itgp.hpp"
#include "itgp/model_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <unistd.h>

using namespace itgp;

namespace {

// A scratch file that cleans itself up, so failed assertions don't leave
// droppings in the test directory.
struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name)
        : path((std::filesystem::temp_directory_path() /
                ("itgp_model_io_" + std::to_string(::getpid()) + "_" + name))
                   .string()) {}
    ~TempFile() { std::remove(path.c_str()); }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

} // namespace

TEST_CASE("a trained GP round-trips through its JSON document") {
    const Dataset data = generate_neal(NealCase::fiducial(5));
    OptimizerConfig cfg;
    cfg.seed = 5;
    const TrainedGP gp = fit(data, KernelSpec{KernelFamily::Matern32}, cfg);

    TempFile file("gp.json");
    save_model(gp, file.path);
    const ModelDocument doc = load_model(file.path);

    CHECK(!doc.is_itgp);
    CHECK(doc.gp.spec.family == KernelFamily::Matern32);
    CHECK(doc.gp.params.log_signal_sd == gp.params.log_signal_sd);
    CHECK(doc.gp.params.log_lengthscale == gp.params.log_lengthscale);
    CHECK(doc.gp.params.log_noise_sd == gp.params.log_noise_sd);
    CHECK(doc.gp.mean_const == gp.mean_const);
    CHECK(doc.gp.train_x == gp.train_x);
    CHECK(doc.gp.train_y == gp.train_y);

    // The rebuilt factorization must predict identically.
    const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(25, -3.0, 3.0);
    const Prediction a = predict(gp, grid);
    const Prediction b = predict(doc.gp, grid);
    CHECK((a.mean - b.mean).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((a.var_observed - b.var_observed).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("an ITGP result round-trips with all bookkeeping intact") {
    const Dataset data = generate_neal(NealCase::fiducial(6));
    ITGPConfig cfg;
    cfg.optimizer.seed = 6;
    const ITGPResult res = itgp_fit(data, cfg);

    TempFile file("itgp.json");
    save_model(res, file.path);
    const ModelDocument doc = load_model(file.path);

    CHECK(doc.is_itgp);
    CHECK(doc.itgp.c == res.c);
    CHECK(doc.itgp.inliers == res.inliers);
    CHECK(doc.itgp.scaled_residuals == res.scaled_residuals);
    CHECK(doc.itgp.n_iterations == res.n_iterations);
    CHECK(doc.itgp.converged == res.converged);
    CHECK(doc.itgp.reweighted == res.reweighted);
    CHECK(doc.itgp.reweight_fallback == res.reweight_fallback);
    CHECK(doc.itgp.selection_sizes == res.selection_sizes);
    CHECK(doc.itgp.gp.params.log_signal_sd == res.gp.params.log_signal_sd);
    // The top-level gp aliases the embedded one.
    CHECK(doc.gp.params.log_signal_sd == doc.itgp.gp.params.log_signal_sd);

    const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(25, -3.0, 3.0);
    const Prediction a = predict_scaled(res, grid);
    const Prediction b = predict_scaled(doc.itgp, grid);
    CHECK((a.mean - b.mean).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((a.var_observed - b.var_observed).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("load_model rejects malformed documents with ModelError") {
    TempFile file("bad.json");

    CHECK_THROWS_AS(load_model("/nonexistent/model.json"), ModelError);

    write_text(file.path, "this is not json at all {");
    CHECK_THROWS_AS(load_model(file.path), ModelError);

    write_text(file.path, "{\"hello\": 1}");
    CHECK_THROWS_AS(load_model(file.path), ModelError); // missing format marker

    write_text(file.path, R"({"format": "something-else", "version": 1, "type": "gp"})");
    CHECK_THROWS_AS(load_model(file.path), ModelError);

    write_text(file.path, R"({"format": "itgp-model", "version": 99, "type": "gp"})");
    CHECK_THROWS_AS(load_model(file.path), ModelError); // unsupported version

    write_text(file.path, R"({"format": "itgp-model", "version": 1, "type": "banana"})");
    CHECK_THROWS_AS(load_model(file.path), ModelError); // unknown type

    write_text(file.path, R"({"format": "itgp-model", "version": 1, "type": "gp",
        "kernel": "rbf", "params": {"log_signal_sd": 0, "log_lengthscale": 0,
        "log_noise_sd": 0}, "mean_const": 0, "train_x": [1], "train_y": [1]})");
    CHECK_THROWS_AS(load_model(file.path), ModelError); // unknown kernel

    write_text(file.path, R"({"format": "itgp-model", "version": 1, "type": "gp",
        "kernel": "se", "params": {"log_signal_sd": 0, "log_lengthscale": 0},
        "mean_const": 0, "train_x": [1], "train_y": [1]})");
    CHECK_THROWS_AS(load_model(file.path), ModelError); // missing param

    write_text(file.path, R"({"format": "itgp-model", "version": 1, "type": "gp",
        "kernel": "se", "params": {"log_signal_sd": 0, "log_lengthscale": 0,
        "log_noise_sd": 0}, "mean_const": 0, "train_x": [1, 2], "train_y": [1]})");
    CHECK_THROWS_AS(load_model(file.path), ModelError); // length mismatch

    write_text(file.path, R"({"format": "itgp-model", "version": 1, "type": "gp",
        "kernel": "se", "params": {"log_signal_sd": 0, "log_lengthscale": 0,
        "log_noise_sd": 0}, "mean_const": 0, "train_x": ["a"], "train_y": [1]})");
    CHECK_THROWS_AS(load_model(file.path), ModelError); // non-numeric array
}

TEST_CASE("load_model validates ITGP-specific fields") {
    const Dataset data = generate_neal(NealCase::fiducial(7));
    ITGPConfig cfg;
    cfg.optimizer.seed = 7;
    cfg.n_maxiter = 2;
    const ITGPResult res = itgp_concentrate(data, cfg);

    TempFile file("itgp_fields.json");
    save_model(res, file.path);

    // Corrupt one field at a time, starting from the valid document.
    std::ifstream in(file.path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();

    auto corrupted = [&](const std::string& from, const std::string& to) {
        std::string t = text;
        const auto pos = t.find(from);
        REQUIRE(pos != std::string::npos);
        t.replace(pos, from.size(), to);
        return t;
    };

    write_text(file.path, corrupted("\"c\":", "\"c_gone\":"));
    CHECK_THROWS_AS(load_model(file.path), ModelError);

    write_text(file.path, corrupted("\"inliers\":", "\"inliers_gone\":"));
    CHECK_THROWS_AS(load_model(file.path), ModelError);

    write_text(file.path, corrupted("\"converged\":", "\"converged_gone\":"));
    CHECK_THROWS_AS(load_model(file.path), ModelError);

    // A negative consistency factor is rejected even though it parses.
    const auto cpos = text.find("\"c\":");
    REQUIRE(cpos != std::string::npos);
    std::string neg = text;
    const auto line_end = neg.find(',', cpos);
    neg.replace(cpos, line_end - cpos, "\"c\": -1.0");
    write_text(file.path, neg);
    CHECK_THROWS_AS(load_model(file.path), ModelError);

    // The untouched document still loads.
    write_text(file.path, text);
    const ModelDocument doc = load_model(file.path);
    CHECK(doc.is_itgp);
    CHECK(doc.itgp.n_iterations == res.n_iterations);
    CHECK(doc.itgp.converged == res.converged);
}

TEST_CASE("save_model reports unwritable destinations") {
    const Dataset data = generate_neal(NealCase::fiducial(8));
    OptimizerConfig cfg;
    cfg.seed = 8;
    OptimizerConfig fast = cfg;
    fast.n_restarts = 1;
    const TrainedGP gp = fit(data, KernelSpec{}, fast);
    CHECK_THROWS_AS(save_model(gp, "/nonexistent/dir/model.json"), std::runtime_error);
}
