#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace itgp {

/// Variance-correction factor for a symmetrically trimmed Gaussian sample.
///
/// Keeping the fraction `alpha` of points with smallest normalized residuals
/// shrinks the fitted variance; multiplying it by `c` restores consistency.
struct ConsistencyFactor {
    double alpha;   ///< kept fraction, in (0, 1]
    double eta_sq;  ///< alpha-quantile of chi^2 with 1 dof (+inf for alpha = 1)
    double c;       ///< alpha / F3(eta_sq), >= 1
};

struct ErrorMetrics {
    double rmse = 0.0;
    double mae = 0.0;
    std::size_t n_test = 0;
};

/// chi^2 CDF for 1 or 3 degrees of freedom, from the erf closed forms.
/// Absolute accuracy ~1e-12. x = +inf returns 1.
double chi2_cdf(double x, int dof);

/// Inverse of chi2_cdf on p in [0, 1), by bracketing + bisection.
double chi2_quantile(double p, int dof = 1);

/// Eq. of the trimming correction: eta^2 = F1^{-1}(alpha), c = alpha / F3(eta^2).
/// alpha = 1 short-circuits to c = 1 (the quantile diverges there).
ConsistencyFactor consistency_factor(double alpha);

/// Indices of the h = ceil(alpha * n) smallest entries of d, ascending.
/// Ties are broken by ascending index.
std::vector<std::size_t> lowest_fraction_indices(const Eigen::VectorXd& d, double alpha);

/// RMSE and MAE of the residuals truth - predicted.
ErrorMetrics compute_metrics(const Eigen::VectorXd& predicted, const Eigen::VectorXd& truth);

} // namespace itgp
