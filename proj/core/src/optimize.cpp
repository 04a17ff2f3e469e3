#include "itgp/optimize.hpp"

#include <cmath>
#include <stdexcept>

namespace itgp {

bool minimize_succeeded(const MinimizeResult& r) {
    return r.status != MinimizeStatus::Abandoned;
}

namespace {

Eigen::VectorXd clamp_to_box(Eigen::VectorXd x, const Box& box) {
    if (box.lower.size() == x.size()) x = x.cwiseMax(box.lower);
    if (box.upper.size() == x.size()) x = x.cwiseMin(box.upper);
    return x;
}

// Projected-gradient norm: ||x - clamp(x - g)||_inf. Zero exactly at a
// box-constrained stationary point.
double projected_grad_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& g, const Box& box) {
    const Eigen::VectorXd moved = clamp_to_box(x - g, box);
    return (x - moved).lpNorm<Eigen::Infinity>();
}

} // namespace

MinimizeResult minimize(const ObjectiveWithGrad& objective, const Eigen::VectorXd& x0,
                        const Box& box, const OptimizerConfig& cfg) {
    if (cfg.max_evals < 1 || cfg.grad_tol <= 0.0 || cfg.step_tol <= 0.0) {
        throw std::invalid_argument("minimize: config values must be positive");
    }
    const auto n = x0.size();
    if (n < 1) throw std::invalid_argument("minimize: empty start point");

    MinimizeResult res;
    Eigen::VectorXd x = clamp_to_box(x0, box);
    Eigen::VectorXd g(n);
    double f = objective(x, g);
    ++res.n_evals;
    if (!std::isfinite(f) || !g.allFinite()) {
        throw std::invalid_argument("minimize: objective not finite at x0");
    }
    res.accepted_f.push_back(f);

    Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
    constexpr double kArmijoC1 = 1e-4;

    while (res.n_evals < cfg.max_evals) {
        if (projected_grad_norm(x, g, box) < cfg.grad_tol) {
            res.status = MinimizeStatus::GradConverged;
            break;
        }

        Eigen::VectorXd p = -(hinv * g);
        if (g.dot(p) >= 0.0) { // not a descent direction, reset to steepest descent
            hinv.setIdentity();
            p = -g;
        }

        double step = 1.0;
        bool accepted = false;
        bool saw_nonfinite = false;
        Eigen::VectorXd x_new(n), g_new(n);
        double f_new = f;
        while (res.n_evals < cfg.max_evals && step >= 1e-14) {
            x_new = clamp_to_box(x + step * p, box);
            const Eigen::VectorXd s = x_new - x;
            if (s.lpNorm<Eigen::Infinity>() == 0.0) break; // fully clamped, no move left
            f_new = objective(x_new, g_new);
            ++res.n_evals;
            if (std::isfinite(f_new) && f_new <= f + kArmijoC1 * g.dot(s)) {
                accepted = true;
                break;
            }
            if (!std::isfinite(f_new)) saw_nonfinite = true;
            step *= 0.5;
        }

        if (!accepted) {
            if (res.n_evals >= cfg.max_evals) {
                res.status = MinimizeStatus::MaxEvals;
            } else {
                res.status = saw_nonfinite ? MinimizeStatus::Abandoned
                                           : MinimizeStatus::LineSearchStalled;
            }
            break;
        }
        if (!g_new.allFinite()) {
            res.status = MinimizeStatus::Abandoned;
            break;
        }

        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd y = g_new - g;
        const double ys = y.dot(s);
        if (ys > 1e-12 * y.norm() * s.norm()) {
            // inverse BFGS update: H <- (I - r s y')H(I - r y s') + r s s'
            const double rho = 1.0 / ys;
            const Eigen::VectorXd hy = hinv * y;
            const double yhy = y.dot(hy);
            hinv += (rho * rho * yhy + rho) * (s * s.transpose());
            hinv -= rho * (hy * s.transpose() + s * hy.transpose());
        }

        x = x_new;
        f = f_new;
        g = g_new;
        res.accepted_f.push_back(f);

        if (s.lpNorm<Eigen::Infinity>() < cfg.step_tol) {
            res.status = MinimizeStatus::StepConverged;
            break;
        }
    }

    res.x = x;
    res.f = f;
    return res;
}

} // namespace itgp
