#pragma once

#include "itgp/datasets.hpp"
#include "itgp/itgp.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace itgp {

enum class BenchmarkCase { Fiducial, Abundant, Skewed, Extreme, Cluster };

std::string to_string(BenchmarkCase c);
BenchmarkCase benchmark_case_from_string(const std::string& name);
std::vector<BenchmarkCase> all_benchmark_cases();

// One completed (or failed) fit+evaluate: method is one of gp, itgp,
// itgp-reweight, ideal. Failed runs carry NaN metrics and are excluded
// from summary means.
struct RunRecord {
    std::uint64_t seed = 0;
    std::string case_name;
    std::string method;
    double rmse = 0.0;
    double mae = 0.0;
    double wall_time = 0.0;
    std::size_t n_iterations = 0;
    bool converged = false;
    bool failed = false;
    std::string error;
};

struct MethodSummary {
    std::string case_name;
    std::string method;
    double mean_rmse = 0.0;
    double mean_mae = 0.0;
    double mean_wall_time = 0.0;
    std::size_t n_replicates = 0; // completed runs entering the means
    std::size_t n_failures = 0;
};

struct BenchmarkReport {
    std::vector<RunRecord> runs;     // ordered by case, then replicate, then method
    std::vector<MethodSummary> rows; // ordered by case, then method
    std::size_t n_total = 0;
    std::size_t n_failed = 0;
};

struct BenchmarkOptions {
    std::vector<BenchmarkCase> cases{BenchmarkCase::Fiducial};
    std::size_t replicates = 50;
    std::uint64_t seed = 0;
    std::size_t workers = 1; // replicate-level worker threads
    double skew_bias = 1.0;  // outlier bias of the skewed case
    std::size_t cluster_n = 300;
    double cluster_outlier_frac = 0.3;
    ITGPConfig itgp; // kernel, trimming and optimizer settings shared by all methods
};

// Runs every (case, replicate, method) combination. Replicate r uses seed
// opts.seed + r for both data generation and the optimizer, so records are
// reproducible and independent of the worker count.
BenchmarkReport run_benchmark(const BenchmarkOptions& opts);

// Deterministic per-run records (no timing columns).
void write_runs_csv(const BenchmarkReport& report, std::ostream& out);

// Per (case, method) aggregate rows, including mean fit times.
void write_report_csv(const BenchmarkReport& report, std::ostream& out);

// Human-readable aligned summary, one block per case.
std::string format_report_table(const BenchmarkReport& report);

} // namespace itgp
