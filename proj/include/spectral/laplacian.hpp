#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "spectral/graph.hpp"

namespace spectral {

/// A symmetric linear operator exposed only through y = A x.
template <class Op>
concept SymmetricOperator = requires(const Op& op, std::span<const double> x, std::span<double> y) {
    { op.size() } -> std::convertible_to<std::size_t>;
    op.apply(x, y);
};

/// How zero-degree nodes were treated: their D^{-1/2} entry is taken as 0,
/// which makes the corresponding row of the normalized Laplacian vanish, so
/// each isolated node contributes one eigenvalue 0 (one component).
struct IsolatedPolicy {
    std::size_t isolated_nodes = 0;
};

/// Matrix-free X = L_norm / 2 with L_norm = D^{-1/2} (D - W) D^{-1/2}.
/// The eigenvalues of X lie in [0, 1].
///
/// Holds a reference to the graph, which must outlive the operator.
class LaplacianOperator {
public:
    explicit LaplacianOperator(const SparseGraph& g) : graph_(&g), inv_sqrt_degree_(g.size(), 0.0) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double d = g.degree(i);
            if (d > 0.0) {
                inv_sqrt_degree_[i] = 1.0 / std::sqrt(d);
            } else {
                ++policy_.isolated_nodes;
            }
        }
    }

    std::size_t size() const { return graph_->size(); }
    const SparseGraph& graph() const { return *graph_; }
    const IsolatedPolicy& isolated_policy() const { return policy_; }
    static constexpr double scale() { return 0.5; }
    std::span<const double> degrees() const { return graph_->degrees(); }
    std::span<const double> inv_sqrt_degrees() const { return inv_sqrt_degree_; }

    void apply(std::span<const double> x, std::span<double> y) const {
        const auto n = size();
        if (x.size() != n || y.size() != n) throw std::invalid_argument("LaplacianOperator: size mismatch");
        const auto& g = *graph_;
        for (std::size_t i = 0; i < n; ++i) {
            const double si = inv_sqrt_degree_[i];
            if (si == 0.0) {
                y[i] = 0.0;
                continue;
            }
            auto nb = g.neighbors(i);
            auto w = g.weights(i);
            double acc = 0.0;
            for (std::size_t k = 0; k < nb.size(); ++k) acc += w[k] * inv_sqrt_degree_[nb[k]] * x[nb[k]];
            y[i] = 0.5 * (x[i] - si * acc);
        }
    }

private:
    const SparseGraph* graph_;
    std::vector<double> inv_sqrt_degree_;
    IsolatedPolicy policy_;
};

inline LaplacianOperator normalized_laplacian(const SparseGraph& g) {
    if (g.size() < 1) throw std::invalid_argument("normalized_laplacian: empty graph");
    return LaplacianOperator(g);
}

/// Diagonal operator with prescribed eigenvalues; handy for synthetic spectra.
class DiagonalOperator {
public:
    explicit DiagonalOperator(std::vector<double> diagonal) : diag_(std::move(diagonal)) {}
    std::size_t size() const { return diag_.size(); }
    void apply(std::span<const double> x, std::span<double> y) const {
        for (std::size_t i = 0; i < diag_.size(); ++i) y[i] = diag_[i] * x[i];
    }

private:
    std::vector<double> diag_;
};

static_assert(SymmetricOperator<LaplacianOperator>);
static_assert(SymmetricOperator<DiagonalOperator>);

} // namespace spectral
