#include "itgp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace itgp {

double chi2_cdf(double x, int dof) {
    if (std::isnan(x) || x < 0.0) {
        throw std::invalid_argument("chi2_cdf: x must be >= 0");
    }
    if (dof != 1 && dof != 3) {
        throw std::invalid_argument("chi2_cdf: only dof 1 and 3 are supported");
    }
    if (std::isinf(x)) return 1.0;
    if (x == 0.0) return 0.0;

    const double e = std::erf(std::sqrt(0.5 * x));
    if (dof == 1) return e;
    // F3(x) = erf(sqrt(x/2)) - sqrt(2x/pi) * exp(-x/2)
    const double tail = std::sqrt(2.0 * x / std::numbers::pi) * std::exp(-0.5 * x);
    return std::max(0.0, e - tail);
}

double chi2_quantile(double p, int dof) {
    if (std::isnan(p) || p < 0.0 || p >= 1.0) {
        throw std::invalid_argument("chi2_quantile: p must lie in [0, 1)");
    }
    if (dof != 1 && dof != 3) {
        throw std::invalid_argument("chi2_quantile: only dof 1 and 3 are supported");
    }
    if (p == 0.0) return 0.0;

    // Expand the bracket, then bisect to machine precision. The CDF is cheap
    // (one erf per call), so plain bisection is plenty.
    double hi = 1.0;
    while (chi2_cdf(hi, dof) < p) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (chi2_cdf(mid, dof) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

ConsistencyFactor consistency_factor(double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0) {
        throw std::invalid_argument("consistency_factor: alpha must lie in (0, 1]");
    }
    if (alpha == 1.0) {
        return {1.0, std::numeric_limits<double>::infinity(), 1.0};
    }
    const double eta_sq = chi2_quantile(alpha, 1);
    const double c = alpha / chi2_cdf(eta_sq, 3);
    return {alpha, eta_sq, c};
}

namespace {

std::size_t trim_count(double alpha, std::size_t n) {
    // ceil(alpha * n), guarded against ties like 0.1 * 30 landing at
    // 3.0000000000000004 and ceiling to 4.
    const double an = alpha * static_cast<double>(n);
    auto h = static_cast<std::size_t>(std::ceil(an - 1e-9));
    if (h < 1) h = 1;
    if (h > n) h = n;
    return h;
}

} // namespace

std::vector<std::size_t> lowest_fraction_indices(const Eigen::VectorXd& d, double alpha) {
    if (d.size() < 1) {
        throw std::invalid_argument("lowest_fraction_indices: empty residual vector");
    }
    if (!(alpha > 0.0) || alpha > 1.0) {
        throw std::invalid_argument("lowest_fraction_indices: alpha must lie in (0, 1]");
    }
    if (!d.allFinite()) {
        throw std::invalid_argument("lowest_fraction_indices: residuals must be finite");
    }
    const auto n = static_cast<std::size_t>(d.size());
    const std::size_t h = trim_count(alpha, n);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&d](std::size_t a, std::size_t b) {
        return d[static_cast<Eigen::Index>(a)] < d[static_cast<Eigen::Index>(b)];
    });
    order.resize(h);
    std::sort(order.begin(), order.end());
    return order;
}

ErrorMetrics compute_metrics(const Eigen::VectorXd& predicted, const Eigen::VectorXd& truth) {
    if (predicted.size() != truth.size()) {
        throw std::invalid_argument("compute_metrics: length mismatch");
    }
    if (predicted.size() == 0) {
        throw std::invalid_argument("compute_metrics: empty input");
    }
    const Eigen::VectorXd delta = truth - predicted;
    ErrorMetrics m;
    m.n_test = static_cast<std::size_t>(delta.size());
    m.rmse = std::sqrt(delta.squaredNorm() / static_cast<double>(delta.size()));
    m.mae = delta.cwiseAbs().mean();
    return m;
}

} // namespace itgp
