#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "spectral/grid.hpp"
#include "spectral/lanczos.hpp"

namespace spectral {

/// Gaussian mixture sum_i w_i k_sigma(x - x_i) tabulated on a uniform grid of
/// [0,1]. Each atom's kernel is renormalized to unit mass over the grid, so
/// the tabulated density integrates to sum_i w_i.
struct SmoothedDensity {
    DiracSpectrum base;
    double sigma = 1e-3;
    double grid_step = 1e-4;
    std::vector<double> values;
    /// Weighted mean of the kernel mass falling inside [0,1] before
    /// renormalization (1 when no atom sits near an edge).
    double inside_mass = 1.0;

    UniformGrid grid() const { return UniformGrid(grid_step); }

    /// Piecewise-linear interpolation of the tabulated values.
    double operator()(double x) const {
        if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("SmoothedDensity: lambda outside [0, 1]");
        UniformGrid g(grid_step);
        const double s = x / g.step();
        const auto i = std::min(static_cast<std::size_t>(s), g.size() - 2);
        const double t = s - static_cast<double>(i);
        return (1.0 - t) * values[i] + t * values[i + 1];
    }
};

inline SmoothedDensity kernel_smooth(const DiracSpectrum& ds, double sigma = 1e-3, double grid_step = 1e-4) {
    if (!(sigma > 0.0)) throw std::invalid_argument("kernel_smooth: sigma must be positive");
    if (ds.nodes.size() != ds.weights.size()) throw std::invalid_argument("kernel_smooth: malformed spectrum");
    UniformGrid grid(grid_step);
    const std::size_t g = grid.size();
    const double h = grid.step();
    SmoothedDensity out;
    out.base = ds;
    out.sigma = sigma;
    out.grid_step = grid_step;
    out.values.assign(g, 0.0);
    const double window = 40.0 * sigma;
    std::vector<double> kernel;
    double inside = 0.0, total_weight = 0.0;
    for (std::size_t a = 0; a < ds.nodes.size(); ++a) {
        const double x0 = ds.nodes[a];
        const double w = ds.weights[a];
        if (w == 0.0) continue;
        const double lo_x = std::max(0.0, x0 - window);
        const double hi_x = std::min(1.0, x0 + window);
        const auto lo = static_cast<std::size_t>(std::max(0.0, std::floor(lo_x / h)));
        const auto hi = std::min(g - 1, static_cast<std::size_t>(std::ceil(hi_x / h)));
        kernel.assign(hi - lo + 1, 0.0);
        double mass = 0.0;
        for (std::size_t i = lo; i <= hi; ++i) {
            const double z = (grid.point(i) - x0) / sigma;
            const double v = std::exp(-0.5 * z * z);
            kernel[i - lo] = v;
            mass += grid.weight(i) * v;
        }
        if (!(mass > 0.0)) continue;
        const double scale = std::sqrt(2.0 * std::acos(-1.0)) * sigma;
        inside += w * std::min(1.0, mass / scale);
        total_weight += w;
        for (std::size_t i = lo; i <= hi; ++i) out.values[i] += w * kernel[i - lo] / mass;
    }
    out.inside_mass = total_weight > 0.0 ? inside / total_weight : 1.0;
    return out;
}

struct MomentBias {
    double raw = 0.0;
    double smoothed = 0.0;
    double analytic_bias = 0.0;
};

namespace detail {

/// Probabilists' Gauss-Hermite rule (weight exp(-z^2/2)/sqrt(2 pi)), exact
/// for polynomials of degree <= 2 * points - 1. Golub-Welsch.
inline void gauss_hermite(std::size_t points, std::vector<double>& nodes, std::vector<double>& weights) {
    const auto k = static_cast<Eigen::Index>(points);
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd sub(k - 1);
    for (Eigen::Index i = 0; i + 1 < k; ++i) sub(i) = std::sqrt(static_cast<double>(i + 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    nodes.resize(points);
    weights.resize(points);
    for (Eigen::Index i = 0; i < k; ++i) {
        nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
        const double v = solver.eigenvectors()(0, i);
        weights[static_cast<std::size_t>(i)] = v * v;
    }
}

} // namespace detail

/// Raw moment sum_i w_i x_i^k, the same moment of the untruncated Gaussian
/// mixture (by Gauss-Hermite quadrature), and the closed-form difference
/// sum_i w_i sum_{j>=1} C(k, 2j) x_i^{k-2j} sigma^{2j} (2j-1)!!.
inline MomentBias smoothed_moment_bias(const DiracSpectrum& ds, double sigma, std::size_t order) {
    if (order < 1) throw std::invalid_argument("smoothed_moment_bias: order must be at least 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("smoothed_moment_bias: sigma must be positive");
    MomentBias out;
    std::vector<double> gh_nodes, gh_weights;
    detail::gauss_hermite(order / 2 + 2, gh_nodes, gh_weights);
    const int k = static_cast<int>(order);
    for (std::size_t a = 0; a < ds.nodes.size(); ++a) {
        const double x = ds.nodes[a];
        const double w = ds.weights[a];
        out.raw += w * std::pow(x, k);
        double smooth = 0.0;
        for (std::size_t q = 0; q < gh_nodes.size(); ++q) smooth += gh_weights[q] * std::pow(x + sigma * gh_nodes[q], k);
        out.smoothed += w * smooth;
        double bias = 0.0, binom = 1.0, double_factorial = 1.0;
        for (int j = 1; 2 * j <= k; ++j) {
            // C(k, 2j) from C(k, 2j-2)
            binom *= static_cast<double>(k - 2 * j + 2) * static_cast<double>(k - 2 * j + 1) /
                     (static_cast<double>(2 * j - 1) * static_cast<double>(2 * j));
            double_factorial *= static_cast<double>(2 * j - 1);
            bias += binom * std::pow(x, k - 2 * j) * std::pow(sigma, 2 * j) * double_factorial;
        }
        out.analytic_bias += w * bias;
    }
    return out;
}

} // namespace spectral
