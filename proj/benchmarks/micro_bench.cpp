#include "itgp/datasets.hpp"
#include "itgp/gp.hpp"
#include "itgp/itgp.hpp"
#include "itgp/kernels.hpp"
#include "itgp/stats.hpp"

#include <benchmark/benchmark.h>

namespace {

itgp::KernelSpec spec_of(int family) {
    itgp::KernelSpec spec;
    spec.family = family == 0 ? itgp::KernelFamily::SquaredExponential
                              : itgp::KernelFamily::Matern32;
    return spec;
}

void BM_cov_matrix(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const itgp::KernelSpec spec = spec_of(static_cast<int>(state.range(1)));
    const itgp::Dataset data = itgp::generate_neal(itgp::NealCase::fiducial(1));
    Eigen::VectorXd x(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        x[i] = data.x[i % data.x.size()] + 1e-3 * static_cast<double>(i);
    }
    const itgp::KernelParams params; // unit scales
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            itgp::cov_matrix(spec, params, x, x, itgp::NoiseMode::TrainDiag));
    }
}
BENCHMARK(BM_cov_matrix)->Args({100, 0})->Args({100, 1})->Args({400, 0});

void BM_nll_with_gradient(benchmark::State& state) {
    const itgp::Dataset data = itgp::generate_neal(itgp::NealCase::fiducial(1));
    const itgp::KernelSpec spec = spec_of(0);
    const itgp::KernelParams params = itgp::heuristic_init(data.x, data.y);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            itgp::neg_log_marginal_likelihood(spec, params, data.y.mean(), data.x, data.y));
    }
}
BENCHMARK(BM_nll_with_gradient);

void BM_gp_fit(benchmark::State& state) {
    const itgp::Dataset data = itgp::generate_neal(itgp::NealCase::fiducial(1));
    itgp::OptimizerConfig opt;
    opt.seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(itgp::fit(data, spec_of(0), opt));
    }
}
BENCHMARK(BM_gp_fit)->Unit(benchmark::kMillisecond);

void BM_itgp_fit(benchmark::State& state) {
    const itgp::Dataset data = itgp::generate_neal(itgp::NealCase::fiducial(1));
    itgp::ITGPConfig cfg;
    cfg.optimizer.seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(itgp::itgp_fit(data, cfg));
    }
}
BENCHMARK(BM_itgp_fit)->Unit(benchmark::kMillisecond);

void BM_predict_grid(benchmark::State& state) {
    const itgp::Dataset data = itgp::generate_neal(itgp::NealCase::fiducial(1));
    itgp::OptimizerConfig opt;
    opt.seed = 1;
    const itgp::TrainedGP gp = itgp::fit(data, spec_of(0), opt);
    const itgp::Dataset grid = itgp::generate_neal_test_grid();
    for (auto _ : state) {
        benchmark::DoNotOptimize(itgp::predict(gp, grid.x));
    }
}
BENCHMARK(BM_predict_grid)->Unit(benchmark::kMillisecond);

void BM_chi2_quantile(benchmark::State& state) {
    double p = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(itgp::chi2_quantile(p, 1));
        p = 0.5 + 0.999 * (p - 0.5); // wander without leaving (0, 1)
    }
}
BENCHMARK(BM_chi2_quantile);

} // namespace

BENCHMARK_MAIN();
