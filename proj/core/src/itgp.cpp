#include "itgp/itgp.hpp"

#include "itgp/errors.hpp"
#include "itgp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace itgp {

namespace {

void validate_config(const ITGPConfig& cfg) {
    if (!(cfg.alpha1 > 0.0 && cfg.alpha1 <= 1.0)) {
        throw std::invalid_argument("itgp_fit: alpha1 must be in (0, 1]");
    }
    if (!(cfg.alpha2 >= 0.0 && cfg.alpha2 < 1.0)) {
        throw std::invalid_argument("itgp_fit: alpha2 must be in [0, 1)");
    }
    if (cfg.n_shrink < 1) throw std::invalid_argument("itgp_fit: n_shrink must be >= 1");
    if (cfg.n_maxiter < 1) throw std::invalid_argument("itgp_fit: n_maxiter must be >= 1");
}

TrainedGP fit_subset(const Dataset& data, const std::vector<std::size_t>& indices,
                     const ITGPConfig& cfg, std::size_t seed_offset,
                     const std::optional<KernelParams>& start, const std::string& stage) {
    OptimizerConfig opt = cfg.optimizer;
    opt.seed += seed_offset;
    try {
        if (indices.size() == static_cast<std::size_t>(data.size())) {
            return fit(data, cfg.spec, opt, start);
        }
        return fit(subset(data, indices), cfg.spec, opt, start);
    } catch (const std::exception& e) {
        throw NumericalError("itgp_fit: " + stage + ": " + e.what());
    }
}

} // namespace

double shrink_alpha(std::size_t j, double alpha1, std::size_t n_shrink) {
    const double frac = 1.0 - static_cast<double>(j) / static_cast<double>(n_shrink);
    return alpha1 + (1.0 - alpha1) * std::max(frac, 0.0);
}

Eigen::VectorXd scaled_residuals(const TrainedGP& gp, const Dataset& data) {
    const Prediction p = predict(gp, data.x);
    const Eigen::ArrayXd sigma = p.var_observed.array().sqrt();
    if ((sigma <= 0.0).any()) {
        throw NumericalError("scaled_residuals: predictive sigma is zero");
    }
    return ((data.y - p.mean).array().abs() / sigma).matrix();
}

ITGPResult itgp_concentrate(const Dataset& data, const ITGPConfig& cfg) {
    validate_config(cfg);
    const auto n = static_cast<std::size_t>(data.size());
    if (n < 10) throw std::invalid_argument("itgp_fit: need at least 10 points");
    if (data.x.size() != data.y.size()) throw std::invalid_argument("itgp_fit: x/y length mismatch");
    if (!data.x.allFinite() || !data.y.allFinite()) {
        throw std::invalid_argument("itgp_fit: data must be finite");
    }

    std::vector<std::size_t> all_indices(n);
    for (std::size_t i = 0; i < n; ++i) all_indices[i] = i;

    ITGPResult res;
    Eigen::VectorXd d;
    std::vector<std::size_t> selected;            // I from the most recent trimming
    std::vector<std::size_t> trained_on;          // subset behind the current res.gp
    std::optional<KernelParams> warm_start;

    for (std::size_t j = 1; j <= cfg.n_maxiter; ++j) {
        const std::vector<std::size_t>& train_set = (j == 1) ? all_indices : selected;
        // Retraining on the identical subset with the identical warm start would
        // reproduce the same model; reuse it and its residuals.
        if (train_set != trained_on) {
            res.gp = fit_subset(data, train_set, cfg, j - 1, warm_start,
                                "iteration " + std::to_string(j));
            trained_on = train_set;
            warm_start = res.gp.params;
            d = scaled_residuals(res.gp, data);
        }

        const double alpha = shrink_alpha(j, cfg.alpha1, cfg.n_shrink);
        std::vector<std::size_t> next = lowest_fraction_indices(d, alpha);
        res.selection_sizes.push_back(next.size());
        res.n_iterations = j;

        // lowest_fraction_indices returns sorted indices, so vector equality is
        // set equality.
        if (next == selected) {
            res.converged = true;
            selected = std::move(next);
            break;
        }
        selected = std::move(next);
    }

    res.inliers = std::move(selected);
    res.c = consistency_factor(cfg.alpha1).c;
    res.scaled_residuals = std::move(d);
    return res;
}

ITGPResult itgp_reweight(const Dataset& data, const ITGPConfig& cfg,
                         const ITGPResult& concentration) {
    if (!(cfg.alpha2 > 0.0 && cfg.alpha2 < 1.0)) {
        throw std::invalid_argument("itgp_reweight: alpha2 must be in (0, 1)");
    }
    const ConsistencyFactor cf2 = consistency_factor(cfg.alpha2);
    const double cutoff = std::sqrt(cf2.eta_sq) * std::sqrt(concentration.c);

    std::vector<std::size_t> kept;
    for (Eigen::Index i = 0; i < concentration.scaled_residuals.size(); ++i) {
        if (concentration.scaled_residuals[i] <= cutoff) {
            kept.push_back(static_cast<std::size_t>(i));
        }
    }

    ITGPResult res = concentration;
    if (kept.size() < 3) {
        res.reweight_fallback = true;
        return res;
    }
    res.gp = fit_subset(data, kept, cfg, concentration.n_iterations,
                        concentration.gp.params, "reweighting step");
    res.scaled_residuals = scaled_residuals(res.gp, data);
    res.inliers = std::move(kept);
    res.c = cf2.c;
    res.reweighted = true;
    return res;
}

ITGPResult itgp_fit(const Dataset& data, const ITGPConfig& cfg) {
    ITGPResult res = itgp_concentrate(data, cfg);
    if (cfg.alpha2 > 0.0) {
        return itgp_reweight(data, cfg, res);
    }
    return res;
}

std::vector<std::size_t> detect_outliers(const ITGPResult& result, const Dataset& data,
                                         double threshold) {
    if (!(threshold > 0.0)) {
        throw std::invalid_argument("detect_outliers: threshold must be positive");
    }
    const Eigen::VectorXd d = scaled_residuals(result.gp, data);
    const double scale = std::sqrt(result.c);
    std::vector<std::size_t> out;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (d[i] / scale > threshold) out.push_back(static_cast<std::size_t>(i));
    }
    return out;
}

Prediction predict_scaled(const ITGPResult& result, const Eigen::VectorXd& x_star) {
    Prediction p = predict(result.gp, x_star);
    p.var_latent *= result.c;
    p.var_observed *= result.c;
    return p;
}

} // namespace itgp
