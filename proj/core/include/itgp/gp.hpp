#pragma once

#include "itgp/datasets.hpp"
#include "itgp/kernels.hpp"
#include "itgp/optimize.hpp"

#include <Eigen/Core>

#include <optional>

namespace itgp {

/// An exact GP regressor after hyperparameter selection. Immutable once
/// built; safe for concurrent predict calls.
struct TrainedGP {
    KernelSpec spec;
    KernelParams params;
    double mean_const = 0.0;
    Eigen::VectorXd train_x;
    Eigen::VectorXd train_y;
    Eigen::MatrixXd chol;      ///< lower factor L with L L' = K_train (+ any jitter used)
    Eigen::VectorXd alpha_vec; ///< K^{-1} (y - mean_const)
    double jitter = 0.0;       ///< diagonal jitter added to make K factorizable
};

struct Prediction {
    Eigen::VectorXd mean;
    Eigen::VectorXd var_latent;   ///< posterior variance of f*, >= 0
    Eigen::VectorXd var_observed; ///< var_latent + sigma_w^2
};

struct NllResult {
    double value = 0.0;
    Eigen::Vector4d gradient; ///< over (log signal sd, log lengthscale, log noise sd, mean_const)
};

/// Negative log marginal likelihood of y under the GP with constant mean:
/// 0.5 r' K^{-1} r + 0.5 log|K| + (n/2) log 2pi, with the analytic gradient.
/// Indefinite covariances get escalating diagonal jitter; see TrainedGP::jitter.
NllResult neg_log_marginal_likelihood(const KernelSpec& spec, const KernelParams& params,
                                      double mean_const, const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& y);

/// Data-driven starting point: signal sd = std(y), lengthscale = median
/// pairwise |xi - xj|, noise sd = std(y). Starting with all variance
/// attributed to noise avoids a degenerate short-lengthscale optimum on
/// heavily contaminated data.
KernelParams heuristic_init(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Build a TrainedGP from fixed hyperparameters (no optimization); caches the
/// Cholesky factor and the alpha vector.
TrainedGP train_with_params(const KernelSpec& spec, const KernelParams& params,
                            double mean_const, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& y);

/// Fit hyperparameters by multi-restart BFGS on the negative log marginal
/// likelihood. mean_const is fixed to the sample mean of y. Restart 0 starts
/// from `start` when given (else the heuristic init); the remaining restarts
/// perturb that point by U(-1, 1) per log-coordinate, seeded by cfg.seed.
TrainedGP fit(const Dataset& data, const KernelSpec& spec, const OptimizerConfig& cfg,
              const std::optional<KernelParams>& start = std::nullopt);

Prediction predict(const TrainedGP& gp, const Eigen::VectorXd& x_star);

} // namespace itgp
