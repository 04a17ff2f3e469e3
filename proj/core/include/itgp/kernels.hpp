#pragma once

#include <Eigen/Core>

#include <string>

namespace itgp {

enum class KernelFamily {
    SquaredExponential,
    Matern32,
};

/// Which stationary family to use. A white-noise term sigma_w^2 * delta_ij is
/// always part of the model; see NoiseMode for where it lands in a matrix.
struct KernelSpec {
    KernelFamily family = KernelFamily::SquaredExponential;
};

/// Kernel hyperparameters, stored in log-space so the implied signal sd,
/// lengthscale and noise sd are strictly positive.
struct KernelParams {
    double log_signal_sd = 0.0;
    double log_lengthscale = 0.0;
    double log_noise_sd = 0.0;

    double signal_sd() const { return std::exp(log_signal_sd); }
    double lengthscale() const { return std::exp(log_lengthscale); }
    double noise_sd() const { return std::exp(log_noise_sd); }
    double signal_var() const { double s = signal_sd(); return s * s; }
    double noise_var() const { double s = noise_sd(); return s * s; }
};

enum class NoiseMode {
    TrainDiag, ///< add sigma_w^2 on the diagonal; X1 and X2 must be the same set
    None,      ///< pure signal covariance, no white-noise term anywhere
};

/// Three hyperparameter derivatives of a training covariance, each n x n and
/// symmetric. Entries are d K / d(log theta) for the log-space parameters.
struct KernelGradients {
    Eigen::MatrixXd d_log_signal_sd;
    Eigen::MatrixXd d_log_lengthscale;
    Eigen::MatrixXd d_log_noise_sd;
};

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

/// Single kernel value k(xi, xj). The white-noise term fires on index
/// identity (same_index), not on coordinate equality.
double kernel_eval(const KernelSpec& spec, const KernelParams& params,
                   double xi, double xj, bool same_index);

/// Covariance matrix between two input sets. TrainDiag requires X1 and X2 to
/// be the same indexed set and adds sigma_w^2 on the diagonal only.
Eigen::MatrixXd cov_matrix(const KernelSpec& spec, const KernelParams& params,
                           const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                           NoiseMode noise_mode);

/// Analytic gradients of cov_matrix(X, X, TrainDiag) w.r.t. the log-params.
KernelGradients cov_matrix_grads(const KernelSpec& spec, const KernelParams& params,
                                 const Eigen::VectorXd& x);

} // namespace itgp
