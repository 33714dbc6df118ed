#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spectral/basis.hpp"
#include "spectral/grid.hpp"
#include "spectral/moments.hpp"

namespace spectral {

/// Exponents of the MaxEnt density are clamped to this magnitude before
/// exponentiation.
inline constexpr double exponent_clamp = 700.0;

struct FitReport {
    double gradient_norm = std::numeric_limits<double>::infinity();  // max_j |g_j|
    std::size_t iterations = 0;
    bool converged = false;
    bool exponent_clamped = false;
    double objective = 0.0;
    std::string stop_reason;  // "converged", "max_iterations" or "line_search"
};

/// Snapshot handed to SolverConfig::observer after every accepted step.
struct NewtonStep {
    std::size_t iteration = 0;
    double objective_before = 0.0;
    double objective_after = 0.0;
    double step_length = 0.0;
    double gradient_norm = 0.0;             // before the step
    std::size_t cg_iterations = 0;
    const Eigen::MatrixXd* hessian = nullptr;  // symmetrized, regularized
};

struct SolverConfig {
    double tolerance = 1e-6;       // per-component gradient bound
    double hessian_noise = 1e-8;   // added to the Hessian diagonal
    std::size_t max_outer_iterations = 500;
    double grid_step = 1e-4;
    std::function<void(const NewtonStep&)> observer;

    void validate() const {
        if (!(tolerance > 0.0)) throw std::invalid_argument("SolverConfig: tolerance must be positive");
        if (!(hessian_noise >= 0.0)) throw std::invalid_argument("SolverConfig: hessian_noise must be >= 0");
        if (!(grid_step > 0.0) || grid_step > 0.01) throw std::invalid_argument("SolverConfig: grid_step must lie in (0, 0.01]");
    }
};

/// p(x) = exp[-(1 + sum_i alpha_i phi_i(x))] on [0,1].
class MaxEntDensity {
public:
    MaxEntDensity() = default;
    MaxEntDensity(Basis basis, std::vector<double> alpha, double grid_step, FitReport report = {})
        : basis_(basis), alpha_(std::move(alpha)), grid_step_(grid_step), report_(std::move(report)) {}

    Basis basis() const { return basis_; }
    std::size_t order() const { return alpha_.empty() ? 0 : alpha_.size() - 1; }
    const std::vector<double>& alpha() const { return alpha_; }
    double grid_step() const { return grid_step_; }
    const FitReport& fit_report() const { return report_; }

    /// 1 + sum_i alpha_i phi_i(x), unclamped.
    double exponent(double x) const {
        std::vector<double> phi(alpha_.size());
        basis_values(basis_, x, phi);
        double e = 1.0;
        for (std::size_t i = 0; i < alpha_.size(); ++i) e += alpha_[i] * phi[i];
        return e;
    }

    double operator()(double x) const {
        if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("MaxEntDensity: lambda outside [0, 1]");
        return std::exp(-std::clamp(exponent(x), -exponent_clamp, exponent_clamp));
    }

    /// Density values on a uniform grid of the given step.
    std::vector<double> on_grid(double step) const {
        UniformGrid grid(step);
        std::vector<double> out(grid.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*this)(grid.point(i));
        return out;
    }

    /// p, dp/dx and d^2p/dx^2 from p' = -p E', p'' = p (E'^2 - E'').
    void derivatives(double x, double& p, double& dp, double& d2p) const {
        const std::size_t n = alpha_.size();
        std::vector<double> v(n), d1(n), d2(n);
        basis_derivatives(basis_, x, v, d1, d2);
        double e = 1.0, e1 = 0.0, e2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            e += alpha_[i] * v[i];
            e1 += alpha_[i] * d1[i];
            e2 += alpha_[i] * d2[i];
        }
        p = std::exp(-std::clamp(e, -exponent_clamp, exponent_clamp));
        dp = -p * e1;
        d2p = p * (e1 * e1 - e2);
    }

private:
    Basis basis_ = Basis::power;
    std::vector<double> alpha_;
    double grid_step_ = 1e-4;
    FitReport report_;
};

inline double evaluate(const MaxEntDensity& density, double lambda) { return density(lambda); }

namespace detail {

/// Discretized dual problem: trapezoid quadrature on a uniform grid with the
/// basis tabulated up to order 2m (needed for the Hessian).
class MaxEntProblem {
public:
    MaxEntProblem(const MomentVector& mv, double grid_step)
        : basis_(mv.basis), m_(mv.order()), grid_(grid_step), mu_(mv.values) {
        const std::size_t g = grid_.size();
        const std::size_t rows = 2 * m_ + 1;
        table_.resize(rows * g);
        weights_ = grid_.weights();
        std::vector<double> phi(rows);
        for (std::size_t i = 0; i < g; ++i) {
            basis_values(basis_, grid_.point(i), phi);
            for (std::size_t l = 0; l < rows; ++l) table_[l * g + i] = phi[l];
        }
        p_.resize(g);
        exponent_.resize(g);
    }

    std::size_t order() const { return m_; }

    /// Dual objective sum_g w_g p_g + sum_i alpha_i mu_i; leaves p_ filled.
    double evaluate(std::span<const double> alpha, bool& clamped) {
        const std::size_t g = grid_.size();
        std::fill(exponent_.begin(), exponent_.end(), 1.0);
        for (std::size_t i = 0; i <= m_; ++i) {
            const double a = alpha[i];
            if (a == 0.0) continue;
            const double* row = &table_[i * g];
            for (std::size_t k = 0; k < g; ++k) exponent_[k] += a * row[k];
        }
        clamped = false;
        double mass = 0.0;
        for (std::size_t k = 0; k < g; ++k) {
            double e = exponent_[k];
            if (!std::isfinite(e)) return std::numeric_limits<double>::infinity();
            if (e < -exponent_clamp || e > exponent_clamp) {
                clamped = true;
                e = std::clamp(e, -exponent_clamp, exponent_clamp);
            }
            p_[k] = std::exp(-e);
            mass += weights_[k] * p_[k];
        }
        double linear = 0.0;
        for (std::size_t i = 0; i <= m_; ++i) linear += alpha[i] * mu_[i];
        return mass + linear;
    }

    /// I_l = integral p phi_l for l = 0..2m, using the current p_.
    std::vector<double> integrals() const {
        const std::size_t g = grid_.size();
        std::vector<double> out(2 * m_ + 1, 0.0);
        std::vector<double> wp(g);
        for (std::size_t k = 0; k < g; ++k) wp[k] = weights_[k] * p_[k];
        for (std::size_t l = 0; l < out.size(); ++l) {
            const double* row = &table_[l * g];
            double acc = 0.0;
            for (std::size_t k = 0; k < g; ++k) acc += wp[k] * row[k];
            out[l] = acc;
        }
        return out;
    }

    /// Hessian H_jk = integral p phi_j phi_k from the product rules
    /// x^j x^k = x^{j+k} and T_j T_k = (T_{j+k} + T_{|j-k|}) / 2.
    Eigen::MatrixXd hessian(const std::vector<double>& integrals) const {
        const auto n = static_cast<Eigen::Index>(m_ + 1);
        Eigen::MatrixXd h(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index k = 0; k < n; ++k) {
                const auto sum = static_cast<std::size_t>(j + k);
                if (basis_ == Basis::power) {
                    h(j, k) = integrals[sum];
                } else {
                    const auto diff = static_cast<std::size_t>(j > k ? j - k : k - j);
                    h(j, k) = 0.5 * (integrals[sum] + integrals[diff]);
                }
            }
        }
        return h;
    }

    const std::vector<double>& targets() const { return mu_; }

private:
    Basis basis_;
    std::size_t m_;
    UniformGrid grid_;
    std::vector<double> mu_;
    std::vector<double> table_;  // (2m+1) x grid, row-major by order
    std::vector<double> weights_;
    std::vector<double> p_;
    std::vector<double> exponent_;
};

/// Jacobi-preconditioned conjugate gradients for the SPD system H x = b.
inline Eigen::VectorXd conjugate_gradient(const Eigen::MatrixXd& h, const Eigen::VectorXd& b, double rel_tol,
                                          std::size_t max_iter, std::size_t& iterations) {
    const Eigen::Index n = b.size();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r = b;
    Eigen::VectorXd inv_diag = h.diagonal().cwiseInverse();
    Eigen::VectorXd z = r.cwiseProduct(inv_diag);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    const double target = rel_tol * b.norm();
    iterations = 0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        Eigen::VectorXd hp = h * p;
        const double php = p.dot(hp);
        if (!(php > 0.0)) break;
        const double a = rz / php;
        x += a * p;
        r -= a * hp;
        iterations = it + 1;
        if (r.norm() <= target) break;
        z = r.cwiseProduct(inv_diag);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    return x;
}

} // namespace detail

/// Minimizes the convex dual  Gamma(alpha) = int p_alpha + sum_i alpha_i mu_i
/// by damped Newton steps (CG inner solves, Armijo backtracking). The
/// gradient is g_j = mu_j - int p phi_j and the Hessian int p phi_j phi_k,
/// symmetrized and shifted by hessian_noise on the diagonal.
inline MaxEntDensity fit_maxent(const MomentVector& mv, const SolverConfig& cfg = {}) {
    cfg.validate();
    if (mv.values.size() < 2) throw std::invalid_argument("fit_maxent: need at least mu_0 and mu_1");
    for (double v : mv.values) {
        if (!std::isfinite(v)) throw std::invalid_argument("fit_maxent: moments must be finite");
    }
    if (std::abs(mv.values[0] - 1.0) > 1e-12) throw std::invalid_argument("fit_maxent: mu_0 must equal 1");

    detail::MaxEntProblem problem(mv, cfg.grid_step);
    const std::size_t n = mv.order() + 1;
    const auto en = static_cast<Eigen::Index>(n);
    std::vector<double> alpha(n, 0.0), trial(n);
    const auto& mu = problem.targets();

    FitReport report;
    bool clamped = false;
    double objective = problem.evaluate(alpha, clamped);
    report.exponent_clamped = clamped;
    constexpr double armijo = 1e-4;
    constexpr double eps = std::numeric_limits<double>::epsilon();

    for (std::size_t iter = 0;; ++iter) {
        auto integrals = problem.integrals();
        Eigen::VectorXd g(en);
        double gnorm = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            g(static_cast<Eigen::Index>(j)) = mu[j] - integrals[j];
            gnorm = std::max(gnorm, std::abs(g(static_cast<Eigen::Index>(j))));
        }
        report.gradient_norm = gnorm;
        report.iterations = iter;
        report.objective = objective;
        if (gnorm < cfg.tolerance) {
            report.converged = true;
            report.stop_reason = "converged";
            break;
        }
        if (iter >= cfg.max_outer_iterations) {
            report.stop_reason = "max_iterations";
            break;
        }

        Eigen::MatrixXd h = problem.hessian(integrals);
        h = 0.5 * (h + h.transpose()).eval();
        h.diagonal().array() += cfg.hessian_noise;
        std::size_t cg_iters = 0;
        Eigen::VectorXd step = detail::conjugate_gradient(h, -g, 1e-12, 20 * n, cg_iters);
        double slope = g.dot(step);
        if (!(slope < 0.0)) {
            // CG broke down; fall back to the scaled gradient direction.
            step = -g.cwiseQuotient(h.diagonal());
            slope = g.dot(step);
        }

        // Roundoff allowance on the objective comparison.
        const double noise = 8.0 * eps * (std::abs(objective) + 1.0);
        double t = 1.0;
        bool accepted = false;
        double trial_objective = objective;
        bool trial_clamped = false;
        for (int halving = 0; halving < 60; ++halving) {
            for (std::size_t j = 0; j < n; ++j) trial[j] = alpha[j] + t * step(static_cast<Eigen::Index>(j));
            trial_objective = problem.evaluate(trial, trial_clamped);
            if (std::isfinite(trial_objective) && trial_objective <= objective + armijo * t * slope + noise) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            problem.evaluate(alpha, clamped);  // restore p for the reported state
            report.stop_reason = "line_search";
            break;
        }
        if (cfg.observer) {
            NewtonStep info;
            info.iteration = iter;
            info.objective_before = objective;
            info.objective_after = trial_objective;
            info.step_length = t;
            info.gradient_norm = gnorm;
            info.cg_iterations = cg_iters;
            info.hessian = &h;
            cfg.observer(info);
        }
        alpha.swap(trial);
        objective = trial_objective;
        report.exponent_clamped = report.exponent_clamped || trial_clamped;
    }
    return MaxEntDensity(mv.basis, std::move(alpha), cfg.grid_step, std::move(report));
}

namespace detail {

inline void check_compatible(const MaxEntDensity& p, const MaxEntDensity& q, const MomentVector& mu) {
    if (p.basis() != q.basis() || p.order() != q.order()) {
        throw std::invalid_argument("divergence: densities differ in basis or moment order");
    }
    if (mu.basis != p.basis() || mu.order() != p.order()) {
        throw std::invalid_argument("divergence: moments do not match the density's basis/order");
    }
}

} // namespace detail

/// Differential entropy S = 1 + sum_i alpha_i mu_i (nats).
inline double entropy_analytic(const MaxEntDensity& density, const MomentVector& mv) {
    if (mv.basis != density.basis() || mv.order() != density.order()) {
        throw std::invalid_argument("entropy_analytic: moments do not match the density's basis/order");
    }
    double s = 1.0;
    for (std::size_t i = 0; i <= density.order(); ++i) s += density.alpha()[i] * mv.values[i];
    return s;
}

/// D_KL(p || q) = -sum_i (alpha_i - beta_i) mu_i^p.
inline double kl_analytic(const MaxEntDensity& p, const MaxEntDensity& q, const MomentVector& mu_p) {
    detail::check_compatible(p, q, mu_p);
    double acc = 0.0;
    for (std::size_t i = 0; i <= p.order(); ++i) acc -= (p.alpha()[i] - q.alpha()[i]) * mu_p.values[i];
    return acc;
}

/// (D_KL(p||q) + D_KL(q||p)) / 2 = sum_i (alpha_i - beta_i)(mu_i^q - mu_i^p) / 2.
inline double symmetric_kl(const MaxEntDensity& p, const MaxEntDensity& q, const MomentVector& mu_p,
                           const MomentVector& mu_q) {
    detail::check_compatible(p, q, mu_p);
    detail::check_compatible(q, p, mu_q);
    double acc = 0.0;
    for (std::size_t i = 0; i <= p.order(); ++i) {
        acc += (p.alpha()[i] - q.alpha()[i]) * (mu_q.values[i] - mu_p.values[i]);
    }
    return 0.5 * acc;
}

} // namespace spectral
