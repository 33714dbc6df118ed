#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "spectral/laplacian.hpp"
#include "spectral/moments.hpp"

namespace spectral {

/// Weighted point masses sum_i w_i delta(x - x_i), nodes ascending.
struct DiracSpectrum {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t steps = 0;       // requested Lanczos steps per start vector
    std::size_t starts = 0;      // start vectors pooled
    std::size_t breakdowns = 0;  // runs that terminated early

    std::size_t size() const { return nodes.size(); }

    double moment(std::size_t k, Basis basis = Basis::power) const {
        std::vector<double> phi(k + 1);
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            basis_values(basis, nodes[i], phi);
            acc += weights[i] * phi[k];
        }
        return acc;
    }
};

/// Gauss quadrature from one Lanczos run: Ritz values and squared first
/// eigenvector components of the tridiagonal matrix.
struct LanczosQuadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
    bool breakdown = false;
};

/// Runs up to m Lanczos steps from `start` (normalized internally), with two
/// passes of full reorthogonalization per step. Terminates early when the
/// next off-diagonal falls below breakdown_tol.
template <SymmetricOperator Op>
LanczosQuadrature lanczos_quadrature(const Op& op, std::size_t m, std::span<const double> start,
                                     double breakdown_tol = 1e-10) {
    const std::size_t n = op.size();
    if (m < 1) throw std::invalid_argument("lanczos: need at least one step");
    if (m > n) throw std::invalid_argument("lanczos: steps exceed the operator dimension");
    if (start.size() != n) throw std::invalid_argument("lanczos: start vector size mismatch");

    double norm = 0.0;
    for (double v : start) norm += v * v;
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) throw std::invalid_argument("lanczos: zero start vector");

    Eigen::MatrixXd q(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < n; ++i) q(static_cast<Eigen::Index>(i), 0) = start[i] / norm;
    std::vector<double> alpha, beta;
    alpha.reserve(m);
    beta.reserve(m);
    Eigen::VectorXd w(static_cast<Eigen::Index>(n));
    LanczosQuadrature out;

    for (std::size_t j = 0; j < m; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        op.apply(std::span<const double>(q.col(jj).data(), n), std::span<double>(w.data(), n));
        const double a = q.col(jj).dot(w);
        alpha.push_back(a);
        if (j + 1 == m) break;
        auto basis = q.leftCols(jj + 1);
        for (int pass = 0; pass < 2; ++pass) {
            Eigen::VectorXd c = basis.transpose() * w;
            w.noalias() -= basis * c;
        }
        const double b = w.norm();
        if (b < breakdown_tol) {
            out.breakdown = true;
            break;
        }
        beta.push_back(b);
        q.col(jj + 1) = w / b;
    }

    const auto k = static_cast<Eigen::Index>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), k);
    Eigen::VectorXd sub(std::max<Eigen::Index>(k - 1, 0));
    for (Eigen::Index i = 0; i + 1 < k; ++i) sub(i) = beta[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw std::runtime_error("lanczos: tridiagonal eigensolver failed");
    out.nodes.resize(static_cast<std::size_t>(k));
    out.weights.resize(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) {
        const double first = solver.eigenvectors()(0, i);
        out.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
        out.weights[static_cast<std::size_t>(i)] = first * first;
    }
    return out;
}

/// Pools the Lanczos quadratures of cfg.probes start vectors (the same probe
/// vectors estimate_moments uses) into one Dirac spectrum. Each run carries
/// total weight 1/d. Ritz values are clamped into [0,1].
template <SymmetricOperator Op>
DiracSpectrum lanczos_spectrum(const Op& op, std::size_t m, const ProbeConfig& cfg) {
    if (cfg.probes < 1) throw std::invalid_argument("lanczos_spectrum: need at least one start vector");
    const std::size_t n = op.size();
    DiracSpectrum ds;
    ds.steps = m;
    ds.starts = cfg.probes;
    std::vector<double> v(n);
    std::vector<std::pair<double, double>> atoms;
    atoms.reserve(m * cfg.probes);
    const double share = 1.0 / static_cast<double>(cfg.probes);
    for (std::size_t j = 0; j < cfg.probes; ++j) {
        make_probe(cfg, j, v);
        auto quad = lanczos_quadrature(op, m, v);
        if (quad.breakdown) ++ds.breakdowns;
        for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
            atoms.emplace_back(std::clamp(quad.nodes[i], 0.0, 1.0), quad.weights[i] * share);
        }
    }
    std::stable_sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    ds.nodes.reserve(atoms.size());
    ds.weights.reserve(atoms.size());
    for (const auto& [x, w] : atoms) {
        ds.nodes.push_back(x);
        ds.weights.push_back(w);
    }
    return ds;
}

} // namespace spectral
