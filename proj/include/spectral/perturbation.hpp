#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spectral/graph.hpp"

namespace spectral {

struct PerturbationReport {
    /// Entrywise L1 norm of L_norm(G') - L_norm(G) (unscaled Laplacians).
    double l1_diff = 0.0;
    /// Sum over added edges (i, j) of the per-edge growth expression
    /// 2 |sum_{g in N(i)} (1/sqrt(d_g d_i) - 1/sqrt(d_g (d_i+1)))
    ///    + sum_{h in N(j)} (1/sqrt(d_h d_j) - 1/sqrt(d_h (d_j+1)))
    ///    + 1/sqrt((d_i+1)(d_j+1))|, evaluated on G.
    double spectral_diff_bound = 0.0;
    std::vector<std::pair<NodeId, NodeId>> edges_added;
};

namespace detail {

inline double edge_growth_term(const SparseGraph& g, NodeId i, NodeId j) {
    auto side = [&](NodeId a) {
        const double da = g.degree(a);
        if (da == 0.0) return 0.0;
        double acc = 0.0;
        auto nb = g.neighbors(a);
        auto w = g.weights(a);
        for (std::size_t k = 0; k < nb.size(); ++k) {
            const double dg = g.degree(nb[k]);
            acc += w[k] * (1.0 / std::sqrt(dg * da) - 1.0 / std::sqrt(dg * (da + 1.0)));
        }
        return acc;
    };
    return 2.0 * std::abs(side(i) + side(j) + 1.0 / std::sqrt((g.degree(i) + 1.0) * (g.degree(j) + 1.0)));
}

} // namespace detail

/// Adds unit-weight edges and reports how much the normalized Laplacian moved.
inline std::pair<SparseGraph, PerturbationReport> perturb_and_report(
    const SparseGraph& g, std::span<const std::pair<NodeId, NodeId>> new_edges) {
    PerturbationReport report;
    std::set<std::pair<NodeId, NodeId>> seen;
    for (auto [a, b] : new_edges) {
        if (a >= g.size() || b >= g.size()) throw std::invalid_argument("perturb_and_report: node out of range");
        if (a == b) throw std::invalid_argument("perturb_and_report: self-loop");
        auto key = std::make_pair(std::min(a, b), std::max(a, b));
        if (g.has_edge(a, b) || !seen.insert(key).second) {
            throw std::invalid_argument("perturb_and_report: edge already present");
        }
        report.edges_added.push_back(key);
    }
    if (report.edges_added.empty()) return {g, report};

    auto edges = g.edges();
    for (auto [a, b] : report.edges_added) edges.push_back({a, b, 1.0});
    SparseGraph perturbed = SparseGraph::from_edges(g.size(), std::span<const WeightedEdge>(edges));

    std::set<NodeId> touched;
    for (auto [a, b] : report.edges_added) {
        touched.insert(a);
        touched.insert(b);
        report.spectral_diff_bound += detail::edge_growth_term(g, a, b);
    }
    auto entry = [](const SparseGraph& h, NodeId a, NodeId b) {
        const double w = h.weight(a, b);
        if (w == 0.0) return 0.0;
        return -w / std::sqrt(h.degree(a) * h.degree(b));
    };
    double l1 = 0.0;
    for (auto a : touched) {
        l1 += std::abs(1.0 - (g.degree(a) > 0.0 ? 1.0 : 0.0));
        for (auto b : perturbed.neighbors(a)) {
            const double diff = std::abs(entry(perturbed, a, b) - entry(g, a, b));
            l1 += touched.count(b) ? diff : 2.0 * diff;
        }
    }
    report.l1_diff = l1;
    return {std::move(perturbed), std::move(report)};
}

} // namespace spectral
