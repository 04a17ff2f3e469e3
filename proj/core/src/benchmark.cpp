#include "itgp/benchmark.hpp"

#include "itgp/gp.hpp"
#include "itgp/stats.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

namespace itgp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Dataset make_training_set(BenchmarkCase c, const BenchmarkOptions& opts, std::uint64_t seed) {
    switch (c) {
    case BenchmarkCase::Fiducial: return generate_neal(NealCase::fiducial(seed));
    case BenchmarkCase::Abundant: return generate_neal(NealCase::abundant(seed));
    case BenchmarkCase::Skewed: return generate_neal(NealCase::skewed(seed, opts.skew_bias));
    case BenchmarkCase::Extreme: return generate_neal(NealCase::extreme(seed));
    case BenchmarkCase::Cluster:
        return generate_cluster_like(opts.cluster_n, opts.cluster_outlier_frac, seed);
    }
    throw std::invalid_argument("unknown benchmark case");
}

Dataset make_test_grid(BenchmarkCase c) {
    if (c == BenchmarkCase::Cluster) return generate_cluster_test_grid();
    return generate_neal_test_grid();
}

ErrorMetrics evaluate(const TrainedGP& gp, const Dataset& grid) {
    const Prediction p = predict(gp, grid.x);
    return compute_metrics(p.mean, grid.y);
}

std::vector<std::size_t> true_inlier_indices(const Dataset& data) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < data.is_outlier.size(); ++i) {
        if (!data.is_outlier[i]) idx.push_back(i);
    }
    return idx;
}

std::vector<std::string> method_names(const BenchmarkOptions& opts) {
    std::vector<std::string> names{"gp", "itgp"};
    if (opts.itgp.alpha2 > 0.0) names.push_back("itgp-reweight");
    names.push_back("ideal");
    return names;
}

void mark_failed(RunRecord& rec, const std::string& error) {
    rec.failed = true;
    rec.error = error;
    rec.rmse = std::numeric_limits<double>::quiet_NaN();
    rec.mae = std::numeric_limits<double>::quiet_NaN();
}

void fill_metrics(RunRecord& rec, const ErrorMetrics& m) {
    rec.rmse = m.rmse;
    rec.mae = m.mae;
}

// Runs all methods for one (case, replicate) pair. `out` points at the
// method-count-sized slice of the record array reserved for this pair.
void run_replicate(BenchmarkCase c, const BenchmarkOptions& opts, std::uint64_t seed,
                   const Dataset& grid, const std::vector<std::string>& methods,
                   RunRecord* out) {
    const std::string case_name = to_string(c);
    for (std::size_t m = 0; m < methods.size(); ++m) {
        out[m].seed = seed;
        out[m].case_name = case_name;
        out[m].method = methods[m];
    }

    Dataset train;
    try {
        train = make_training_set(c, opts, seed);
    } catch (const std::exception& e) {
        for (std::size_t m = 0; m < methods.size(); ++m) {
            mark_failed(out[m], std::string("data generation: ") + e.what());
        }
        return;
    }

    ITGPConfig cfg = opts.itgp;
    cfg.optimizer.seed = seed;

    std::size_t m = 0;
    { // gp
        RunRecord& rec = out[m++];
        try {
            const auto start = Clock::now();
            const TrainedGP gp = fit(train, cfg.spec, cfg.optimizer);
            rec.wall_time = seconds_since(start);
            fill_metrics(rec, evaluate(gp, grid));
            rec.n_iterations = 1;
            rec.converged = true;
        } catch (const std::exception& e) {
            mark_failed(rec, e.what());
        }
    }

    ITGPResult conc;
    bool have_conc = false;
    double conc_time = 0.0;
    { // itgp (concentration only)
        RunRecord& rec = out[m++];
        try {
            const auto start = Clock::now();
            conc = itgp_concentrate(train, cfg);
            conc_time = seconds_since(start);
            have_conc = true;
            rec.wall_time = conc_time;
            fill_metrics(rec, evaluate(conc.gp, grid));
            rec.n_iterations = conc.n_iterations;
            rec.converged = conc.converged;
        } catch (const std::exception& e) {
            mark_failed(rec, e.what());
        }
    }

    if (cfg.alpha2 > 0.0) { // itgp-reweight
        RunRecord& rec = out[m++];
        if (!have_conc) {
            mark_failed(rec, "concentration phase failed");
        } else {
            try {
                const auto start = Clock::now();
                const ITGPResult rw = itgp_reweight(train, cfg, conc);
                rec.wall_time = conc_time + seconds_since(start);
                fill_metrics(rec, evaluate(rw.gp, grid));
                rec.n_iterations = rw.n_iterations;
                rec.converged = rw.converged;
            } catch (const std::exception& e) {
                mark_failed(rec, e.what());
            }
        }
    }

    { // ideal: standard GP on the ground-truth inliers
        RunRecord& rec = out[m++];
        try {
            if (!train.has_outlier_flags()) {
                throw std::runtime_error("dataset carries no ground-truth flags");
            }
            const Dataset pure = subset(train, true_inlier_indices(train));
            const auto start = Clock::now();
            const TrainedGP gp = fit(pure, cfg.spec, cfg.optimizer);
            rec.wall_time = seconds_since(start);
            fill_metrics(rec, evaluate(gp, grid));
            rec.n_iterations = 1;
            rec.converged = true;
        } catch (const std::exception& e) {
            mark_failed(rec, e.what());
        }
    }
}

std::string csv_number(double v) { return format_double(v); }

} // namespace

std::string to_string(BenchmarkCase c) {
    switch (c) {
    case BenchmarkCase::Fiducial: return "fiducial";
    case BenchmarkCase::Abundant: return "abundant";
    case BenchmarkCase::Skewed: return "skewed";
    case BenchmarkCase::Extreme: return "extreme";
    case BenchmarkCase::Cluster: return "cluster";
    }
    throw std::invalid_argument("unknown benchmark case");
}

BenchmarkCase benchmark_case_from_string(const std::string& name) {
    for (BenchmarkCase c : all_benchmark_cases()) {
        if (name == to_string(c)) return c;
    }
    throw std::invalid_argument("unknown benchmark case '" + name + "'");
}

std::vector<BenchmarkCase> all_benchmark_cases() {
    return {BenchmarkCase::Fiducial, BenchmarkCase::Abundant, BenchmarkCase::Skewed,
            BenchmarkCase::Extreme, BenchmarkCase::Cluster};
}

BenchmarkReport run_benchmark(const BenchmarkOptions& opts) {
    if (opts.cases.empty()) throw std::invalid_argument("run_benchmark: no cases selected");
    if (opts.replicates < 1) throw std::invalid_argument("run_benchmark: replicates must be >= 1");
    if (opts.workers < 1) throw std::invalid_argument("run_benchmark: workers must be >= 1");

    const std::vector<std::string> methods = method_names(opts);
    const std::size_t n_methods = methods.size();
    const std::size_t n_pairs = opts.cases.size() * opts.replicates;

    std::vector<Dataset> grids;
    grids.reserve(opts.cases.size());
    for (BenchmarkCase c : opts.cases) grids.push_back(make_test_grid(c));

    BenchmarkReport report;
    report.runs.resize(n_pairs * n_methods);

    auto run_pair = [&](std::size_t pair) {
        const std::size_t case_idx = pair / opts.replicates;
        const std::size_t rep = pair % opts.replicates;
        run_replicate(opts.cases[case_idx], opts, opts.seed + rep, grids[case_idx], methods,
                      report.runs.data() + pair * n_methods);
    };

    if (opts.workers == 1) {
        for (std::size_t pair = 0; pair < n_pairs; ++pair) run_pair(pair);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t pair = next.fetch_add(1); pair < n_pairs;
                 pair = next.fetch_add(1)) {
                run_pair(pair);
            }
        };
        std::vector<std::thread> pool;
        const std::size_t n_threads = std::min(opts.workers, n_pairs);
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    report.n_total = report.runs.size();
    for (const RunRecord& rec : report.runs) {
        if (rec.failed) ++report.n_failed;
    }

    for (std::size_t case_idx = 0; case_idx < opts.cases.size(); ++case_idx) {
        for (std::size_t m = 0; m < n_methods; ++m) {
            MethodSummary row;
            row.case_name = to_string(opts.cases[case_idx]);
            row.method = methods[m];
            double sum_rmse = 0.0, sum_mae = 0.0, sum_time = 0.0;
            for (std::size_t rep = 0; rep < opts.replicates; ++rep) {
                const RunRecord& rec =
                    report.runs[(case_idx * opts.replicates + rep) * n_methods + m];
                if (rec.failed) {
                    ++row.n_failures;
                    continue;
                }
                sum_rmse += rec.rmse;
                sum_mae += rec.mae;
                sum_time += rec.wall_time;
                ++row.n_replicates;
            }
            if (row.n_replicates > 0) {
                const auto k = static_cast<double>(row.n_replicates);
                row.mean_rmse = sum_rmse / k;
                row.mean_mae = sum_mae / k;
                row.mean_wall_time = sum_time / k;
            } else {
                row.mean_rmse = std::numeric_limits<double>::quiet_NaN();
                row.mean_mae = std::numeric_limits<double>::quiet_NaN();
                row.mean_wall_time = std::numeric_limits<double>::quiet_NaN();
            }
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

void write_runs_csv(const BenchmarkReport& report, std::ostream& out) {
    out << "seed,case,method,rmse,mae,n_iterations,converged,failed\n";
    for (const RunRecord& rec : report.runs) {
        out << rec.seed << ',' << rec.case_name << ',' << rec.method << ','
            << csv_number(rec.rmse) << ',' << csv_number(rec.mae) << ',' << rec.n_iterations
            << ',' << (rec.converged ? 1 : 0) << ',' << (rec.failed ? 1 : 0) << '\n';
    }
}

void write_report_csv(const BenchmarkReport& report, std::ostream& out) {
    out << "case,method,mean_rmse,mean_mae,mean_wall_time,n_replicates,n_failures\n";
    for (const MethodSummary& row : report.rows) {
        out << row.case_name << ',' << row.method << ',' << csv_number(row.mean_rmse) << ','
            << csv_number(row.mean_mae) << ',' << csv_number(row.mean_wall_time) << ','
            << row.n_replicates << ',' << row.n_failures << '\n';
    }
}

std::string format_report_table(const BenchmarkReport& report) {
    std::ostringstream out;
    std::string current_case;
    char line[160];
    for (const MethodSummary& row : report.rows) {
        if (row.case_name != current_case) {
            if (!current_case.empty()) out << '\n';
            current_case = row.case_name;
            out << "case: " << current_case << '\n';
            std::snprintf(line, sizeof(line), "  %-14s %10s %10s %12s %6s %9s\n", "method",
                          "mean RMSE", "mean MAE", "mean fit [s]", "runs", "failures");
            out << line;
        }
        std::snprintf(line, sizeof(line), "  %-14s %10.4f %10.4f %12.4f %6zu %9zu\n",
                      row.method.c_str(), row.mean_rmse, row.mean_mae, row.mean_wall_time,
                      row.n_replicates, row.n_failures);
        out << line;
    }
    out << '\n'
        << "note: the Student-t likelihood GP baseline is not implemented in this tool.\n";
    if (report.n_failed > 0) {
        out << "note: " << report.n_failed << " of " << report.n_total
            << " runs failed and were excluded from the means.\n";
    }
    return out.str();
}

} // namespace itgp
