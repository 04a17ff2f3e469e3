#include "itgp/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace itgp {

std::string to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::SquaredExponential: return "se";
        case KernelFamily::Matern32: return "matern32";
    }
    throw std::invalid_argument("to_string: unknown kernel family");
}

KernelFamily kernel_family_from_string(const std::string& name) {
    if (name == "se") return KernelFamily::SquaredExponential;
    if (name == "matern32") return KernelFamily::Matern32;
    throw std::invalid_argument("unknown kernel family '" + name + "' (expected se or matern32)");
}

namespace {

constexpr double kSqrt3 = std::numbers::sqrt3;

// Noise-free kernel value at scaled distance u = |xi - xj| / l.
double base_value(KernelFamily family, double signal_var, double u) {
    switch (family) {
        case KernelFamily::SquaredExponential:
            return signal_var * std::exp(-0.5 * u * u);
        case KernelFamily::Matern32:
            return signal_var * (1.0 + kSqrt3 * u) * std::exp(-kSqrt3 * u);
    }
    return 0.0;
}

// d(base value)/d(log l) at scaled distance u.
double base_dlog_lengthscale(KernelFamily family, double signal_var, double u) {
    switch (family) {
        case KernelFamily::SquaredExponential:
            return signal_var * std::exp(-0.5 * u * u) * u * u;
        case KernelFamily::Matern32:
            return 3.0 * signal_var * u * u * std::exp(-kSqrt3 * u);
    }
    return 0.0;
}

void check_finite_inputs(const Eigen::VectorXd& x, const char* who) {
    if (!x.allFinite()) {
        throw std::invalid_argument(std::string(who) + ": inputs must be finite");
    }
}

void check_params(const KernelParams& params, const char* who) {
    if (!std::isfinite(params.log_signal_sd) || !std::isfinite(params.log_lengthscale) ||
        !std::isfinite(params.log_noise_sd)) {
        throw std::invalid_argument(std::string(who) + ": params must be finite");
    }
}

} // namespace

double kernel_eval(const KernelSpec& spec, const KernelParams& params,
                   double xi, double xj, bool same_index) {
    if (!std::isfinite(xi) || !std::isfinite(xj)) {
        throw std::invalid_argument("kernel_eval: inputs must be finite");
    }
    check_params(params, "kernel_eval");
    const double u = std::abs(xi - xj) / params.lengthscale();
    double k = base_value(spec.family, params.signal_var(), u);
    if (same_index) k += params.noise_var();
    return k;
}

Eigen::MatrixXd cov_matrix(const KernelSpec& spec, const KernelParams& params,
                           const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                           NoiseMode noise_mode) {
    check_finite_inputs(x1, "cov_matrix");
    check_finite_inputs(x2, "cov_matrix");
    check_params(params, "cov_matrix");
    if (noise_mode == NoiseMode::TrainDiag &&
        (x1.size() != x2.size() || (x1.array() != x2.array()).any())) {
        throw std::invalid_argument("cov_matrix: TrainDiag requires X1 and X2 to be the same set");
    }

    const double sv = params.signal_var();
    const double inv_l = 1.0 / params.lengthscale();
    const auto n1 = x1.size();
    const auto n2 = x2.size();

    Eigen::MatrixXd k(n1, n2);
    for (Eigen::Index i = 0; i < n1; ++i) {
        for (Eigen::Index j = 0; j < n2; ++j) {
            k(i, j) = base_value(spec.family, sv, std::abs(x1[i] - x2[j]) * inv_l);
        }
    }
    if (noise_mode == NoiseMode::TrainDiag) {
        k.diagonal().array() += params.noise_var();
    }
    return k;
}

KernelGradients cov_matrix_grads(const KernelSpec& spec, const KernelParams& params,
                                 const Eigen::VectorXd& x) {
    check_finite_inputs(x, "cov_matrix_grads");
    check_params(params, "cov_matrix_grads");

    const double sv = params.signal_var();
    const double inv_l = 1.0 / params.lengthscale();
    const auto n = x.size();

    KernelGradients g;
    g.d_log_signal_sd.resize(n, n);
    g.d_log_lengthscale.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double u = std::abs(x[i] - x[j]) * inv_l;
            // d(sigma^2 f(u))/d(log sigma) = 2 sigma^2 f(u)
            const double ds = 2.0 * base_value(spec.family, sv, u);
            const double dl = base_dlog_lengthscale(spec.family, sv, u);
            g.d_log_signal_sd(i, j) = ds;
            g.d_log_signal_sd(j, i) = ds;
            g.d_log_lengthscale(i, j) = dl;
            g.d_log_lengthscale(j, i) = dl;
        }
    }
    g.d_log_noise_sd = Eigen::MatrixXd::Zero(n, n);
    g.d_log_noise_sd.diagonal().setConstant(2.0 * params.noise_var());
    return g;
}

} // namespace itgp
