#pragma once

#include "itgp/datasets.hpp"
#include "itgp/gp.hpp"
#include "itgp/kernels.hpp"
#include "itgp/optimize.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace itgp {

struct ITGPConfig {
    double alpha1 = 0.5;        // trimming fraction, in (0, 1]
    double alpha2 = 0.95;       // reweighting fraction, in [0, 1); 0 disables reweighting
    std::size_t n_shrink = 5;   // iterations over which the kept fraction shrinks to alpha1
    std::size_t n_maxiter = 10; // cap on concentration iterations
    OptimizerConfig optimizer;
    KernelSpec spec;
};

struct ITGPResult {
    TrainedGP gp;
    double c = 1.0;                         // consistency factor matching the returned model
    std::vector<std::size_t> inliers;       // ascending indices into the training data
    Eigen::VectorXd scaled_residuals;       // |y - mu| / sigma under the returned model
    std::size_t n_iterations = 0;
    bool converged = false;                 // inlier set repeated on consecutive iterations
    bool reweighted = false;                // final model comes from the reweighting refit
    bool reweight_fallback = false;         // reweighting kept < 3 points; concentration
                                            // result returned instead
    std::vector<std::size_t> selection_sizes; // |I| selected at each iteration
};

// Kept fraction at iteration j (1-based): alpha1 + (1 - alpha1) * max(1 - j/n_shrink, 0).
double shrink_alpha(std::size_t j, double alpha1, std::size_t n_shrink);

// d_i = |y_i - mu_i| / sigma_i with sigma on the observed scale (latent + noise).
Eigen::VectorXd scaled_residuals(const TrainedGP& gp, const Dataset& data);

// Concentration phase only: iterate train/predict/trim until the inlier set
// repeats or n_maxiter is reached. Ignores cfg.alpha2.
ITGPResult itgp_concentrate(const Dataset& data, const ITGPConfig& cfg);

// Reweighting phase: re-select inliers from the concentration residuals with
// the alpha2 cutoff and refit once. Falls back to the concentration result
// when fewer than 3 points survive the cutoff.
ITGPResult itgp_reweight(const Dataset& data, const ITGPConfig& cfg,
                         const ITGPResult& concentration);

// Full algorithm: concentration, then reweighting when cfg.alpha2 > 0.
ITGPResult itgp_fit(const Dataset& data, const ITGPConfig& cfg);

// Indices with d_i / sqrt(c) > threshold, recomputed from the returned model.
std::vector<std::size_t> detect_outliers(const ITGPResult& result, const Dataset& data,
                                         double threshold = 2.0);

// Prediction with variances multiplied by the consistency factor. The stored
// model itself is never rescaled.
Prediction predict_scaled(const ITGPResult& result, const Eigen::VectorXd& x_star);

} // namespace itgp
