#include "itgp/gp.hpp"

#include "itgp/errors.hpp"
#include "itgp/rng.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace itgp {

namespace {

constexpr double kLogParamBound = 15.0;

struct Factorization {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double jitter = 0.0;
};

// Cholesky with escalating diagonal jitter: start at 1e-10 * mean(diag K),
// multiply by 10 up to 1e-4 * mean(diag K), then give up.
Factorization cholesky_with_jitter(const Eigen::MatrixXd& k) {
    Factorization f;
    f.llt.compute(k);
    if (f.llt.info() == Eigen::Success) return f;

    const double scale = k.diagonal().mean();
    std::ostringstream tried;
    for (double level = 1e-10; level <= 1e-4 * 1.0000001; level *= 10.0) {
        const double jitter = level * scale;
        Eigen::MatrixXd kj = k;
        kj.diagonal().array() += jitter;
        f.llt.compute(kj);
        if (f.llt.info() == Eigen::Success) {
            f.jitter = jitter;
            return f;
        }
        tried << ' ' << jitter;
    }
    throw NumericalError("covariance not positive definite; attempted jitters:" + tried.str());
}

Eigen::Vector3d to_vec(const KernelParams& p) {
    return {p.log_signal_sd, p.log_lengthscale, p.log_noise_sd};
}

KernelParams from_vec(const Eigen::Vector3d& v) {
    return {v[0], v[1], v[2]};
}

} // namespace

NllResult neg_log_marginal_likelihood(const KernelSpec& spec, const KernelParams& params,
                                      double mean_const, const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& y) {
    if (x.size() != y.size() || x.size() < 1) {
        throw std::invalid_argument("neg_log_marginal_likelihood: need matching, nonempty x and y");
    }
    if (!std::isfinite(mean_const)) {
        throw std::invalid_argument("neg_log_marginal_likelihood: mean_const must be finite");
    }
    const auto n = x.size();

    const Eigen::MatrixXd k = cov_matrix(spec, params, x, x, NoiseMode::TrainDiag);
    const Factorization f = cholesky_with_jitter(k);

    const Eigen::VectorXd r = y.array() - mean_const;
    const Eigen::VectorXd alpha = f.llt.solve(r);

    const double log_det = 2.0 * f.llt.matrixLLT().diagonal().array().log().sum();
    NllResult out;
    out.value = 0.5 * r.dot(alpha) + 0.5 * log_det +
                0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);

    // d/d theta = 0.5 tr((K^{-1} - alpha alpha') dK/dtheta), elementwise since
    // both factors are symmetric.
    const Eigen::MatrixXd kinv = f.llt.solve(Eigen::MatrixXd::Identity(n, n));
    const Eigen::MatrixXd w = kinv - alpha * alpha.transpose();
    const KernelGradients grads = cov_matrix_grads(spec, params, x);
    out.gradient[0] = 0.5 * w.cwiseProduct(grads.d_log_signal_sd).sum();
    out.gradient[1] = 0.5 * w.cwiseProduct(grads.d_log_lengthscale).sum();
    out.gradient[2] = 0.5 * w.cwiseProduct(grads.d_log_noise_sd).sum();
    out.gradient[3] = -alpha.sum();
    return out;
}

KernelParams heuristic_init(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const auto n = x.size();
    double sd_y = 0.0;
    if (n > 1) {
        const double mean = y.mean();
        sd_y = std::sqrt((y.array() - mean).square().sum() / static_cast<double>(n - 1));
    }
    sd_y = std::max(sd_y, 1e-8);

    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(n) * (static_cast<std::size_t>(n) - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            dists.push_back(std::abs(x[i] - x[j]));
        }
    }
    double median_dist = 1.0;
    if (!dists.empty()) {
        auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
        std::nth_element(dists.begin(), mid, dists.end());
        median_dist = std::max(*mid, 1e-8);
    }

    // Start with the noise scale at std(y): descending from "all variance is
    // noise" reliably reaches the smooth optimum, whereas a small initial
    // noise scale can push contaminated data into a degenerate
    // interpolate-everything solution (lengthscale collapsing to the bound).
    KernelParams p;
    p.log_signal_sd = std::log(sd_y);
    p.log_lengthscale = std::log(median_dist);
    p.log_noise_sd = std::log(sd_y);
    return p;
}

TrainedGP train_with_params(const KernelSpec& spec, const KernelParams& params,
                            double mean_const, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& y) {
    if (x.size() != y.size() || x.size() < 1) {
        throw std::invalid_argument("train_with_params: need matching, nonempty x and y");
    }
    if (!x.allFinite() || !y.allFinite() || !std::isfinite(mean_const)) {
        throw std::invalid_argument("train_with_params: inputs must be finite");
    }
    TrainedGP gp;
    gp.spec = spec;
    gp.params = params;
    gp.mean_const = mean_const;
    gp.train_x = x;
    gp.train_y = y;

    const Eigen::MatrixXd k = cov_matrix(spec, params, x, x, NoiseMode::TrainDiag);
    const Factorization f = cholesky_with_jitter(k);
    gp.chol = f.llt.matrixL();
    gp.jitter = f.jitter;
    gp.alpha_vec = f.llt.solve(Eigen::VectorXd(y.array() - mean_const));
    return gp;
}

TrainedGP fit(const Dataset& data, const KernelSpec& spec, const OptimizerConfig& cfg,
              const std::optional<KernelParams>& start) {
    const auto n = data.x.size();
    if (n != data.y.size()) throw std::invalid_argument("fit: x/y length mismatch");
    if (n < 3) throw std::invalid_argument("fit: need at least 3 points");
    if (!data.x.allFinite() || !data.y.allFinite()) {
        throw std::invalid_argument("fit: data must be finite");
    }
    if (cfg.n_restarts < 1) throw std::invalid_argument("fit: need at least one restart");

    const double mean_const = data.y.mean();
    const ObjectiveWithGrad objective = [&](const Eigen::VectorXd& v, Eigen::VectorXd& grad) {
        const NllResult nll =
            neg_log_marginal_likelihood(spec, from_vec(v), mean_const, data.x, data.y);
        grad = nll.gradient.head<3>();
        return nll.value;
    };

    Box box;
    box.lower = Eigen::VectorXd::Constant(3, -kLogParamBound);
    box.upper = Eigen::VectorXd::Constant(3, kLogParamBound);

    const Eigen::Vector3d heuristic = to_vec(heuristic_init(data.x, data.y));
    const Eigen::Vector3d x0 = start ? to_vec(*start) : heuristic;
    // With a warm start, one restart always begins from the data-driven
    // heuristic so a poor warm basin cannot capture every restart.
    const bool try_heuristic =
        start && cfg.n_restarts > 1 && (x0 - heuristic).cwiseAbs().maxCoeff() > 1e-12;
    Rng rng(cfg.seed);

    bool have_best = false;
    MinimizeResult best;
    std::string last_error = "no restarts ran";
    for (std::size_t restart = 0; restart < cfg.n_restarts; ++restart) {
        Eigen::Vector3d init = x0;
        if (restart == 1 && try_heuristic) {
            init = heuristic;
        } else if (restart > 0) {
            for (int i = 0; i < 3; ++i) init[i] += rng.uniform(-1.0, 1.0);
        }
        try {
            MinimizeResult r = minimize(objective, init, box, cfg);
            if (!minimize_succeeded(r)) {
                last_error = "restart abandoned (objective turned non-finite)";
                continue;
            }
            if (!have_best || r.f < best.f) {
                best = std::move(r);
                have_best = true;
            }
        } catch (const std::exception& e) {
            last_error = e.what();
        }
    }
    if (!have_best) {
        throw NumericalError("fit: all restarts failed (" + last_error + ")");
    }
    return train_with_params(spec, from_vec(best.x), mean_const, data.x, data.y);
}

Prediction predict(const TrainedGP& gp, const Eigen::VectorXd& x_star) {
    if (!x_star.allFinite()) {
        throw std::invalid_argument("predict: query points must be finite");
    }
    const Eigen::MatrixXd k_star =
        cov_matrix(gp.spec, gp.params, gp.train_x, x_star, NoiseMode::None);

    Prediction p;
    p.mean = (k_star.transpose() * gp.alpha_vec).array() + gp.mean_const;

    // var_latent = k(x*, x*) - || L^{-1} k_* ||^2, clamped at zero
    const Eigen::MatrixXd v =
        gp.chol.triangularView<Eigen::Lower>().solve(k_star);
    const double prior_var = gp.params.signal_var();
    p.var_latent = (prior_var - v.colwise().squaredNorm().array()).max(0.0);
    p.var_observed = p.var_latent.array() + gp.params.noise_var();
    return p;
}

} // namespace itgp
