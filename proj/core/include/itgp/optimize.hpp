#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <vector>

namespace itgp {

struct OptimizerConfig {
    std::size_t n_restarts = 3;
    std::size_t max_evals = 200;
    double grad_tol = 1e-6;
    double step_tol = 1e-9;
    std::uint64_t seed = 0;
};

/// Objective callback: return f(x) and fill grad (same length as x).
/// One invocation counts as one evaluation.
using ObjectiveWithGrad = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct Box {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};

enum class MinimizeStatus {
    GradConverged,     ///< projected gradient below grad_tol
    StepConverged,     ///< accepted step below step_tol
    MaxEvals,          ///< evaluation budget exhausted
    LineSearchStalled, ///< no acceptable finite step found; best point returned
    Abandoned,         ///< objective turned non-finite and no progress possible
};

struct MinimizeResult {
    Eigen::VectorXd x;
    double f = 0.0;
    MinimizeStatus status = MinimizeStatus::MaxEvals;
    std::size_t n_evals = 0;
    std::vector<double> accepted_f; ///< objective value at each accepted iterate, x0 first
};

bool minimize_succeeded(const MinimizeResult& r);

/// Dense BFGS with an Armijo backtracking line search, bounds handled by
/// projection. Deterministic: the trajectory depends only on (objective, x0,
/// box, cfg). Guarantees f <= f(x0) on return. Restarts are the caller's
/// responsibility (pick the lowest f over seeds, ties by restart index).
MinimizeResult minimize(const ObjectiveWithGrad& objective, const Eigen::VectorXd& x0,
                        const Box& box, const OptimizerConfig& cfg);

} // namespace itgp
