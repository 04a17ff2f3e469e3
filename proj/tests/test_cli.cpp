#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "itgp/datasets.hpp"
#include "itgp/model_io.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#ifndef ITGP_CLI_PATH
#error "ITGP_CLI_PATH must point at the itgp executable"
#endif

namespace fs = std::filesystem;

namespace {

const fs::path& work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("itgp_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

// Runs the CLI with `args`, captures stdout/stderr, returns the exit code.
int run_cli(const std::string& args, std::string* out_text = nullptr,
            std::string* err_text = nullptr) {
    const fs::path out_file = work_dir() / "stdout.txt";
    const fs::path err_file = work_dir() / "stderr.txt";
    const std::string cmd = std::string(ITGP_CLI_PATH) + " " + args + " >'" + out_file.string() +
                            "' 2>'" + err_file.string() + "'";
    const int ret = std::system(cmd.c_str());
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    if (out_text) *out_text = slurp(out_file);
    if (err_text) *err_text = slurp(err_file);
    if (ret == -1) return -1;
    return WIFEXITED(ret) ? WEXITSTATUS(ret) : -1;
}

std::string slurp_file(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

std::string train_csv() {
    static const std::string path = [] {
        const fs::path p = work_dir() / "train.csv";
        itgp::write_csv_file(p.string(), itgp::generate_neal(itgp::NealCase::fiducial(3)));
        return p.string();
    }();
    return path;
}

std::string in_dir(const std::string& name) { return (work_dir() / name).string(); }

} // namespace

TEST_CASE("help exits cleanly, missing subcommands do not") {
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("fit --help") == 0);
    CHECK(run_cli("benchmark --help") == 0);

    CHECK(run_cli("") == 2);                  // a subcommand is required
    CHECK(run_cli("frobnicate") == 2);        // unknown subcommand
    CHECK(run_cli("fit") == 2);               // missing required input
    CHECK(run_cli("fit x.csv --bogus 1") == 2);
}

TEST_CASE("fit/predict/outliers pipeline with a plain GP") {
    std::string out;
    const std::string model = in_dir("gp_model.json");
    CHECK(run_cli("fit '" + train_csv() + "' --method gp --seed 3 --out '" + model + "'", &out) ==
          0);
    CHECK(out.find("method=gp") != std::string::npos);
    CHECK(fs::exists(model));

    const itgp::ModelDocument doc = itgp::load_model(model);
    CHECK(!doc.is_itgp);
    CHECK(doc.gp.train_x.size() == 100);

    const std::string pred = in_dir("gp_pred.csv");
    CHECK(run_cli("predict '" + model + "' --grid=-3:3:11 --out '" + pred + "'", &out) == 0);
    const auto rows = lines_of(slurp_file(pred));
    REQUIRE(rows.size() == 12);
    CHECK(rows[0] == "x,mean,sd_latent,sd_observed");
    CHECK(rows[1].substr(0, 3) == "-3,");

    const std::string outliers = in_dir("gp_outliers.csv");
    CHECK(run_cli("outliers '" + model + "' '" + train_csv() + "' --out '" + outliers + "'",
                  &out) == 0);
    CHECK(out.find("outliers: flagged") != std::string::npos);
    const auto orows = lines_of(slurp_file(outliers));
    CHECK(orows[0] == "index,x,y,r_prime");
    // The fiducial training set carries 15 gross outliers; a plain GP at
    // threshold 2 should flag at least a few of them.
    CHECK(orows.size() > 3);
}

TEST_CASE("fit/predict with the trimming method exposes the scaled spread") {
    std::string out;
    const std::string model = in_dir("itgp_model.json");
    CHECK(run_cli("fit '" + train_csv() + "' --method itgp --seed 3 --out '" + model + "'",
                  &out) == 0);
    CHECK(out.find("method=itgp") != std::string::npos);
    CHECK(out.find("converged=yes") != std::string::npos);

    const itgp::ModelDocument doc = itgp::load_model(model);
    REQUIRE(doc.is_itgp);
    CHECK(doc.itgp.reweighted);

    const std::string pred = in_dir("itgp_pred.csv");
    CHECK(run_cli("predict '" + model + "' --grid=0:1:3 --out '" + pred + "'", &out) == 0);
    const auto rows = lines_of(slurp_file(pred));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "x,mean,sd_latent,sd_observed,sd_scaled");

    // sd_scaled must equal sd_observed * sqrt(c) on every row.
    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::stringstream ss(rows[i]);
        std::string field;
        std::vector<double> vals;
        while (std::getline(ss, field, ',')) vals.push_back(std::stod(field));
        REQUIRE(vals.size() == 5);
        CHECK(vals[4] == doctest::Approx(vals[3] * std::sqrt(doc.itgp.c)).epsilon(1e-12));
    }
}

TEST_CASE("predict accepts a query CSV and ignores extra columns") {
    const std::string model = in_dir("itgp_model.json");
    if (!fs::exists(model)) {
        REQUIRE(run_cli("fit '" + train_csv() + "' --method itgp --seed 3 --out '" + model +
                        "'") == 0);
    }
    const std::string query = in_dir("query.csv");
    {
        std::ofstream q(query);
        q << "note,x\nfirst,0.25\nsecond,-1.5\n";
    }
    const std::string pred = in_dir("query_pred.csv");
    CHECK(run_cli("predict '" + model + "' '" + query + "' --out '" + pred + "'") == 0);
    const auto rows = lines_of(slurp_file(pred));
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].substr(0, 5) == "0.25,");
    CHECK(rows[2].substr(0, 5) == "-1.5,");
}

TEST_CASE("bad inputs exit with the usage code") {
    const std::string model = in_dir("itgp_model.json");
    std::string err;

    CHECK(run_cli("fit '" + in_dir("missing.csv") + "'") == 2);
    CHECK(run_cli("fit '" + train_csv() + "' --kernel rbf") == 2);
    CHECK(run_cli("fit '" + train_csv() + "' --method nonsense") == 2);
    CHECK(run_cli("fit '" + train_csv() + "' --method itgp --alpha1 2.0 --out '" +
                      in_dir("x.json") + "'",
                  nullptr, &err) == 2);
    CHECK(err.find("alpha1") != std::string::npos);

    CHECK(run_cli("predict '" + model + "'") == 2);                          // no query, no grid
    CHECK(run_cli("predict '" + model + "' q.csv --grid=0:1:5") == 2);       // both given
    CHECK(run_cli("predict '" + model + "' --grid=5:1:10") == 2);            // lo >= hi
    CHECK(run_cli("predict '" + model + "' --grid=0:1:1") == 2);             // too few points
    CHECK(run_cli("predict '" + in_dir("no_model.json") + "' --grid=0:1:5") == 2);

    const std::string bad_query = in_dir("bad_query.csv");
    {
        std::ofstream q(bad_query);
        q << "x\n1.0\nnot_a_number\n";
    }
    CHECK(run_cli("predict '" + model + "' '" + bad_query + "'", nullptr, &err) == 2);
    CHECK(err.find("line 3") != std::string::npos);

    CHECK(run_cli("outliers '" + model + "' '" + train_csv() + "' --threshold 0") == 2);
    CHECK(run_cli("outliers '" + model + "' '" + train_csv() + "' --threshold -2") == 2);

    const std::string corrupt = in_dir("corrupt.json");
    {
        std::ofstream c(corrupt);
        c << "{ definitely not a model";
    }
    CHECK(run_cli("predict '" + corrupt + "' --grid=0:1:5", nullptr, &err) == 2);
    CHECK(err.find("error:") != std::string::npos);
}

TEST_CASE("a config file supplies defaults and the command line overrides it") {
    const std::string cfg = in_dir("fit.conf");
    {
        std::ofstream c(cfg);
        // Trim to 70% and skip reweighting so the kept count is predictable.
        c << "alpha1 = 0.7\nalpha2 = 0\nseed = 3\n";
    }

    std::string out;
    CHECK(run_cli("fit '" + train_csv() + "' --method itgp --config '" + cfg + "' --out '" +
                      in_dir("cfg_a.json") + "'",
                  &out) == 0);
    CHECK(out.find("inliers=70") != std::string::npos);

    // An explicit flag beats the file value.
    CHECK(run_cli("fit '" + train_csv() + "' --method itgp --config '" + cfg +
                      "' --alpha1 0.5 --out '" + in_dir("cfg_b.json") + "'",
                  &out) == 0);
    CHECK(out.find("inliers=50") != std::string::npos);

    CHECK(run_cli("fit '" + train_csv() + "' --config '" + in_dir("no_such.conf") + "'") == 2);
}

TEST_CASE("benchmark runs are reproducible byte for byte") {
    const std::string dir_a = in_dir("bench_a");
    const std::string dir_b = in_dir("bench_b");
    std::string out;

    CHECK(run_cli("benchmark --case fiducial --replicates 2 --seed 7 --out '" + dir_a + "'",
                  &out) == 0);
    CHECK(out.find("fiducial") != std::string::npos);
    CHECK(run_cli("benchmark --case fiducial --replicates 2 --seed 7 --out '" + dir_b + "'") == 0);

    for (const char* name : {"runs.csv", "report.csv", "table.txt"}) {
        CAPTURE(name);
        CHECK(fs::exists(fs::path(dir_a) / name));
    }
    CHECK(slurp_file(fs::path(dir_a) / "runs.csv") == slurp_file(fs::path(dir_b) / "runs.csv"));

    const auto rows = lines_of(slurp_file(fs::path(dir_a) / "runs.csv"));
    REQUIRE(rows.size() == 9); // header + 2 replicates x 4 methods
    CHECK(rows[0] == "seed,case,method,rmse,mae,n_iterations,converged,failed");

    CHECK(run_cli("benchmark --case bogus --out '" + in_dir("bench_c") + "'") == 2);
    CHECK(run_cli("benchmark --replicates 0 --out '" + in_dir("bench_c") + "'") == 2);
}
