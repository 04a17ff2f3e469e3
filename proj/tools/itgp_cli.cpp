#include "itgp/benchmark.hpp"
#include "itgp/datasets.hpp"
#include "itgp/errors.hpp"
#include "itgp/gp.hpp"
#include "itgp/itgp.hpp"
#include "itgp/model_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

constexpr int kExitUsage = 2;     // bad input: flags, CSV, model files
constexpr int kExitNumerical = 3; // computation failed

// Tunables shared by fit and benchmark.
struct FitFlags {
    std::string kernel = "se";
    double alpha1 = 0.5;
    double alpha2 = 0.95;
    std::size_t n_shrink = 5;
    std::size_t n_maxiter = 10;
    std::size_t restarts = 3;
    std::uint64_t seed = 0;
};

void add_fit_flags(CLI::App* cmd, FitFlags& f) {
    cmd->add_option("--kernel", f.kernel, "Kernel family")
        ->check(CLI::IsMember({"se", "matern32"}))
        ->capture_default_str();
    cmd->add_option("--alpha1", f.alpha1, "Trimming fraction, in (0, 1]")
        ->capture_default_str();
    cmd->add_option("--alpha2", f.alpha2, "Reweighting fraction, in [0, 1); 0 disables")
        ->capture_default_str();
    cmd->add_option("--n-shrink", f.n_shrink, "Iterations over which the kept fraction shrinks")
        ->capture_default_str();
    cmd->add_option("--n-maxiter", f.n_maxiter, "Maximum trimming iterations")
        ->capture_default_str();
    cmd->add_option("--restarts", f.restarts, "Optimizer restarts per fit")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--seed", f.seed, "Base random seed")->capture_default_str();
}

itgp::ITGPConfig make_config(const FitFlags& f) {
    itgp::ITGPConfig cfg;
    cfg.alpha1 = f.alpha1;
    cfg.alpha2 = f.alpha2;
    cfg.n_shrink = f.n_shrink;
    cfg.n_maxiter = f.n_maxiter;
    cfg.spec.family = itgp::kernel_family_from_string(f.kernel);
    cfg.optimizer.n_restarts = f.restarts;
    cfg.optimizer.seed = f.seed;
    return cfg;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

// Query files need only an x column; any other columns are ignored.
Eigen::VectorXd read_query_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(in, line)) throw itgp::CsvError(1, "empty file, expected a header row");
    const auto header = split_fields(line);
    std::size_t col_x = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "x") col_x = i;
    }
    if (col_x == header.size()) throw itgp::CsvError(1, "header must contain column x");

    std::vector<double> xs;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw itgp::CsvError(line_no, "expected " + std::to_string(header.size()) +
                                              " fields, got " + std::to_string(fields.size()));
        }
        const std::string& field = fields[col_x];
        const char* begin = field.c_str();
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin || *end != '\0' || !std::isfinite(v)) {
            throw itgp::CsvError(line_no, "non-numeric value '" + field + "' in column x");
        }
        xs.push_back(v);
    }
    if (xs.empty()) throw itgp::CsvError(line_no, "no data rows");
    return Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

Eigen::VectorXd parse_grid(const std::string& text) {
    const auto bad = [&] {
        return std::invalid_argument("--grid expects lo:hi:m with lo < hi and m >= 2, got '" +
                                     text + "'");
    };
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : text) {
        if (ch == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    parts.push_back(cur);
    if (parts.size() != 3) throw bad();

    char* end = nullptr;
    const double lo = std::strtod(parts[0].c_str(), &end);
    if (end == parts[0].c_str() || *end != '\0') throw bad();
    const double hi = std::strtod(parts[1].c_str(), &end);
    if (end == parts[1].c_str() || *end != '\0') throw bad();
    const unsigned long m = std::strtoul(parts[2].c_str(), &end, 10);
    if (end == parts[2].c_str() || *end != '\0') throw bad();
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo >= hi || m < 2) throw bad();

    Eigen::VectorXd x(static_cast<Eigen::Index>(m));
    const double step = (hi - lo) / static_cast<double>(m - 1);
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = lo + step * static_cast<double>(i);
    return x;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

// Applies `key = value` lines from a config file to the options of one
// subcommand. Explicit command-line flags always win; keys that do not name
// an option of this subcommand are ignored, so one file can serve several
// subcommands. Values go through the same conversion and validation as flags.
void apply_config_file(CLI::App* cmd, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = CLI::detail::trim_copy(line);
        if (s.empty() || s[0] == '#' || s[0] == ';' || s[0] == '[') continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        }
        std::string key = CLI::detail::trim_copy(s.substr(0, eq));
        std::string value = CLI::detail::trim_copy(s.substr(eq + 1));
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
            value.back() == value.front()) {
            value = value.substr(1, value.size() - 2);
        }
        std::replace(key.begin(), key.end(), '_', '-');
        if (key == "config") continue;

        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (opt == nullptr || opt->count() > 0) continue;
        opt->add_result(value);
        opt->run_callback();
    }
}

struct FitArgs {
    std::string input;
    std::string method = "gp";
    std::string out = "model.json";
    std::string config;
    FitFlags flags;
};

int run_fit(const FitArgs& a) {
    const itgp::Dataset data = itgp::read_csv_file(a.input);
    const itgp::ITGPConfig cfg = make_config(a.flags);
    char line[256];
    if (a.method == "gp") {
        const itgp::TrainedGP gp = itgp::fit(data, cfg.spec, cfg.optimizer);
        itgp::save_model(gp, a.out);
        std::snprintf(line, sizeof(line), "fit: n=%zu method=gp inliers=%zu c=1 model=%s",
                      data.size(), data.size(), a.out.c_str());
    } else {
        const itgp::ITGPResult res = itgp::itgp_fit(data, cfg);
        itgp::save_model(res, a.out);
        std::snprintf(line, sizeof(line),
                      "fit: n=%zu method=itgp inliers=%zu c=%.6g iterations=%zu converged=%s "
                      "reweighted=%s%s model=%s",
                      data.size(), res.inliers.size(), res.c, res.n_iterations,
                      res.converged ? "yes" : "no", res.reweighted ? "yes" : "no",
                      res.reweight_fallback ? " (reweighting kept <3 points)" : "",
                      a.out.c_str());
    }
    std::cout << line << '\n';
    return 0;
}

struct PredictArgs {
    std::string model;
    std::string query;
    std::string grid;
    std::string out = "predictions.csv";
    std::string config;
};

int run_predict(const PredictArgs& a) {
    if (a.query.empty() == a.grid.empty()) {
        throw std::invalid_argument("predict needs exactly one of a query CSV or --grid");
    }
    const itgp::ModelDocument doc = itgp::load_model(a.model);
    const Eigen::VectorXd xq = a.grid.empty() ? read_query_csv(a.query) : parse_grid(a.grid);
    const itgp::Prediction p = itgp::predict(doc.gp, xq);

    auto out = open_output(a.out);
    out << "x,mean,sd_latent,sd_observed";
    if (doc.is_itgp) out << ",sd_scaled";
    out << '\n';
    const double root_c = doc.is_itgp ? std::sqrt(doc.itgp.c) : 1.0;
    for (Eigen::Index i = 0; i < xq.size(); ++i) {
        const double sd_obs = std::sqrt(p.var_observed[i]);
        out << itgp::format_double(xq[i]) << ',' << itgp::format_double(p.mean[i]) << ','
            << itgp::format_double(std::sqrt(p.var_latent[i])) << ','
            << itgp::format_double(sd_obs);
        if (doc.is_itgp) out << ',' << itgp::format_double(sd_obs * root_c);
        out << '\n';
    }
    std::cout << "predict: wrote " << xq.size() << " rows to " << a.out << '\n';
    return 0;
}

struct OutlierArgs {
    std::string model;
    std::string input;
    double threshold = 2.0;
    std::string out = "outliers.csv";
    std::string config;
};

int run_outliers(const OutlierArgs& a) {
    const itgp::ModelDocument doc = itgp::load_model(a.model);
    const itgp::Dataset data = itgp::read_csv_file(a.input);
    itgp::ITGPResult res;
    if (doc.is_itgp) {
        res = doc.itgp;
    } else {
        res.gp = doc.gp; // plain GP: score with c = 1
    }
    const std::vector<std::size_t> flagged = itgp::detect_outliers(res, data, a.threshold);
    const Eigen::VectorXd d = itgp::scaled_residuals(res.gp, data);
    const double root_c = std::sqrt(res.c);

    auto out = open_output(a.out);
    out << "index,x,y,r_prime\n";
    for (std::size_t i : flagged) {
        const auto k = static_cast<Eigen::Index>(i);
        out << i << ',' << itgp::format_double(data.x[k]) << ','
            << itgp::format_double(data.y[k]) << ','
            << itgp::format_double(d[k] / root_c) << '\n';
    }
    char line[160];
    std::snprintf(line, sizeof(line), "outliers: flagged %zu of %zu rows (threshold %g) -> %s",
                  flagged.size(), data.size(), a.threshold, a.out.c_str());
    std::cout << line << '\n';
    return 0;
}

struct BenchArgs {
    std::string case_name = "all";
    std::size_t replicates = 50;
    std::size_t workers = 1;
    std::string out = "bench";
    double skew_bias = 1.0;
    std::size_t cluster_n = 300;
    double cluster_frac = 0.3;
    std::string config;
    FitFlags flags;
};

int run_benchmark_cmd(const BenchArgs& a) {
    itgp::BenchmarkOptions opts;
    if (a.case_name == "all") {
        opts.cases = itgp::all_benchmark_cases();
    } else {
        opts.cases = {itgp::benchmark_case_from_string(a.case_name)};
    }
    opts.replicates = a.replicates;
    opts.seed = a.flags.seed;
    opts.workers = a.workers;
    opts.skew_bias = a.skew_bias;
    opts.cluster_n = a.cluster_n;
    opts.cluster_outlier_frac = a.cluster_frac;
    opts.itgp = make_config(a.flags);

    const itgp::BenchmarkReport report = itgp::run_benchmark(opts);

    std::filesystem::create_directories(a.out);
    const auto path = [&](const char* name) {
        return (std::filesystem::path(a.out) / name).string();
    };
    {
        auto runs = open_output(path("runs.csv"));
        itgp::write_runs_csv(report, runs);
        auto rows = open_output(path("report.csv"));
        itgp::write_report_csv(report, rows);
        auto table = open_output(path("table.txt"));
        table << itgp::format_report_table(report);
    }
    std::cout << itgp::format_report_table(report);
    std::cout << "benchmark: wrote runs.csv, report.csv, table.txt to " << a.out << '\n';

    if (report.n_failed * 5 > report.n_total) {
        std::cerr << "error: more than 20% of runs failed\n";
        return kExitNumerical;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust Gaussian process regression with iterative trimming"};
    app.require_subcommand(1);

    FitArgs fit_args;
    CLI::App* fit_cmd = app.add_subcommand("fit", "Fit a model to a CSV of (x, y) points");
    fit_cmd->add_option("input", fit_args.input, "Training CSV with columns x,y")->required();
    fit_cmd->add_option("--method", fit_args.method, "Fitting method")
        ->check(CLI::IsMember({"gp", "itgp"}))
        ->capture_default_str();
    fit_cmd->add_option("--out", fit_args.out, "Output model JSON path")->capture_default_str();
    add_fit_flags(fit_cmd, fit_args.flags);

    PredictArgs predict_args;
    CLI::App* predict_cmd =
        app.add_subcommand("predict", "Predict from a saved model on a grid or query CSV");
    predict_cmd->add_option("model", predict_args.model, "Model JSON path")->required();
    predict_cmd->add_option("query", predict_args.query, "Query CSV with column x");
    predict_cmd->add_option("--grid", predict_args.grid, "Evenly spaced queries lo:hi:m");
    predict_cmd->add_option("--out", predict_args.out, "Output CSV path")->capture_default_str();

    OutlierArgs outlier_args;
    CLI::App* outlier_cmd =
        app.add_subcommand("outliers", "Score a CSV against a saved model and list outliers");
    outlier_cmd->add_option("model", outlier_args.model, "Model JSON path")->required();
    outlier_cmd->add_option("input", outlier_args.input, "Data CSV with columns x,y")->required();
    outlier_cmd->add_option("--threshold", outlier_args.threshold, "Flag rows with r' above this")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    outlier_cmd->add_option("--out", outlier_args.out, "Output CSV path")->capture_default_str();

    BenchArgs bench_args;
    CLI::App* bench_cmd =
        app.add_subcommand("benchmark", "Run the synthetic contamination benchmarks");
    bench_cmd->add_option("--case", bench_args.case_name, "Benchmark case")
        ->check(CLI::IsMember({"fiducial", "abundant", "skewed", "extreme", "cluster", "all"}))
        ->capture_default_str();
    bench_cmd->add_option("--replicates", bench_args.replicates, "Replicates per case")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench_cmd->add_option("--workers", bench_args.workers, "Worker threads over replicates")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench_cmd->add_option("--out", bench_args.out, "Output directory")->capture_default_str();
    bench_cmd->add_option("--b-o", bench_args.skew_bias, "Outlier bias of the skewed case")
        ->capture_default_str();
    bench_cmd->add_option("--cluster-n", bench_args.cluster_n, "Cluster case training size")
        ->capture_default_str();
    bench_cmd
        ->add_option("--cluster-frac", bench_args.cluster_frac,
                     "Cluster case contamination fraction")
        ->capture_default_str();
    add_fit_flags(bench_cmd, bench_args.flags);

    const char* config_help = "Read option defaults from a key = value file";
    fit_cmd->add_option("--config", fit_args.config, config_help);
    predict_cmd->add_option("--config", predict_args.config, config_help);
    outlier_cmd->add_option("--config", outlier_args.config, config_help);
    bench_cmd->add_option("--config", bench_args.config, config_help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*fit_cmd) {
            apply_config_file(fit_cmd, fit_args.config);
            return run_fit(fit_args);
        }
        if (*predict_cmd) {
            apply_config_file(predict_cmd, predict_args.config);
            return run_predict(predict_args);
        }
        if (*outlier_cmd) {
            apply_config_file(outlier_cmd, outlier_args.config);
            return run_outliers(outlier_args);
        }
        if (*bench_cmd) {
            apply_config_file(bench_cmd, bench_args.config);
            return run_benchmark_cmd(bench_args);
        }
    } catch (const itgp::NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return 0;
}
