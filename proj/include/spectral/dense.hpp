#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spectral/graph.hpp"
#include "spectral/laplacian.hpp"

namespace spectral {

/// Largest dimension for which dense eigendecompositions are attempted.
inline constexpr std::size_t dense_size_limit = 2000;

class DenseLimitError : public std::length_error {
public:
    explicit DenseLimitError(std::size_t n)
        : std::length_error("dense eigendecomposition refused for n = " + std::to_string(n) + " > " +
                            std::to_string(dense_size_limit) + "; use estimate_moments instead") {}
};

/// Materializes any symmetric operator column by column (n matvecs).
template <SymmetricOperator Op>
Eigen::MatrixXd materialize(const Op& op) {
    const std::size_t n = op.size();
    Eigen::MatrixXd m(n, n);
    std::vector<double> e(n, 0.0), col(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        op.apply(e, col);
        for (std::size_t i = 0; i < n; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
        e[j] = 0.0;
    }
    return m;
}

inline Eigen::MatrixXd dense_adjacency(const SparseGraph& g) {
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : g.edges()) {
        w(e.u, e.v) = e.weight;
        w(e.v, e.u) = e.weight;
    }
    return w;
}

/// Unscaled normalized Laplacian D^{-1/2}(D - W)D^{-1/2}, zero rows for
/// isolated nodes.
inline Eigen::MatrixXd dense_normalized_laplacian(const SparseGraph& g) {
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = g.degree(static_cast<std::size_t>(i));
        s(i) = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
        if (d > 0.0) l(i, i) = 1.0;
    }
    for (const auto& e : g.edges()) {
        const double v = -e.weight * s(e.u) * s(e.v);
        l(e.u, e.v) = v;
        l(e.v, e.u) = v;
    }
    return l;
}

/// Combinatorial Laplacian D - W.
inline Eigen::MatrixXd dense_laplacian(const SparseGraph& g) {
    Eigen::MatrixXd w = dense_adjacency(g);
    Eigen::MatrixXd l = -w;
    for (Eigen::Index i = 0; i < l.rows(); ++i) l(i, i) = w.row(i).sum();
    return l;
}

inline std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& m) {
    if (static_cast<std::size_t>(m.rows()) > dense_size_limit) throw DenseLimitError(static_cast<std::size_t>(m.rows()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("dense eigendecomposition failed");
    std::vector<double> out(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
    std::sort(out.begin(), out.end());
    return out;
}

/// Ascending eigenvalues of a symmetric operator (dense; n <= dense_size_limit).
template <SymmetricOperator Op>
std::vector<double> operator_eigenvalues(const Op& op) {
    if (op.size() > dense_size_limit) throw DenseLimitError(op.size());
    return symmetric_eigenvalues(materialize(op));
}

} // namespace spectral
