#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace itgp {

/// Paired inputs/targets, plus ground-truth columns when produced by a
/// synthetic generator. Optional fields are empty when unknown.
struct Dataset {
    Eigen::VectorXd x;
    Eigen::VectorXd y;
    Eigen::VectorXd f_true;         ///< empty unless generated
    std::vector<bool> is_outlier;   ///< empty unless generated

    std::size_t size() const { return static_cast<std::size_t>(x.size()); }
    bool has_truth() const { return f_true.size() == x.size() && x.size() > 0; }
    bool has_outlier_flags() const { return is_outlier.size() == size() && size() > 0; }
};

/// Rows of `data` selected by `indices` (truth columns carried along).
Dataset subset(const Dataset& data, const std::vector<std::size_t>& indices);

/// Parameters of one synthetic contamination benchmark draw: n_train points
/// with x ~ U(-3, 3); a round(pi_o * n) subset gets heavy noise
/// N(b_o, sigma_o^2) around the true curve, the rest N(0, sigma_r^2).
struct NealCase {
    double pi_o = 0.15;
    double b_o = 0.0;
    double sigma_o = 1.0;
    double sigma_r = 0.1;
    std::size_t n_train = 100;
    std::uint64_t seed = 0;

    static NealCase fiducial(std::uint64_t seed = 0);
    static NealCase abundant(std::uint64_t seed = 0);
    static NealCase skewed(std::uint64_t seed = 0, double b_o = 1.0);
    static NealCase extreme(std::uint64_t seed = 0);
};

/// The smooth target of the contamination benchmark:
/// f(x) = 0.3 + 0.4 x + 0.5 sin(2.7 x) + 1.1 / (1 + x^2).
double neal_true_function(double x);

Dataset generate_neal(const NealCase& c);

/// Noise-free evaluation grid: m evenly spaced points on [-3, 3].
Dataset generate_neal_test_grid(std::size_t m = 2000);

/// Monotone ridge curve of the cluster-like benchmark, defined on [10, 18].
/// Cubic in t = (x - 10) / 8: g = 0.6 + 1.4 t - 0.35 t^2 + 0.6 t^3.
double cluster_ridge_function(double x);

/// Local noise level of the cluster-like benchmark: grows linearly from
/// 0.005 at x = 10 to 0.05 at x = 18.
double cluster_noise_sd(double x);

/// Heteroscedastic contamination benchmark: inliers scatter around the ridge
/// with x-dependent noise; the contaminated fraction sits strictly above the
/// ridge at an offset drawn from U(0.02, 0.4).
Dataset generate_cluster_like(std::size_t n, double outlier_frac, std::uint64_t seed);

/// Noise-free ridge grid on [10, 18], analogous to the Neal test grid.
Dataset generate_cluster_test_grid(std::size_t m = 2000);

/// Format a double with 17 significant digits (round-trips exactly).
std::string format_double(double v);

/// CSV with header x,y[,is_outlier,f_true]; values at 17 significant digits.
void write_csv(std::ostream& out, const Dataset& data);
void write_csv_file(const std::string& path, const Dataset& data);

/// Reads the schema written by write_csv. Requires x and y columns; accepts
/// is_outlier and f_true. Throws CsvError with the offending line number.
Dataset read_csv(std::istream& in);
Dataset read_csv_file(const std::string& path);

} // namespace itgp
