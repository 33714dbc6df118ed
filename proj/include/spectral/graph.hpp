#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <queue>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace spectral {

using NodeId = std::uint32_t;

struct WeightedEdge {
    NodeId u = 0;
    NodeId v = 0;
    double weight = 1.0;
};

/// Undirected weighted graph in compressed adjacency form.
///
/// Each undirected edge is stored twice (once per endpoint); neighbor lists
/// are sorted by node index, weights are strictly positive and there are no
/// self-loops.
class SparseGraph {
public:
    SparseGraph() = default;

    /// Builds a graph on `n` nodes. Entries naming the same unordered pair are
    /// merged by summing their weights.
    static SparseGraph from_edges(std::size_t n, std::span<const WeightedEdge> edges) {
        std::vector<WeightedEdge> canon;
        canon.reserve(edges.size());
        for (const auto& e : edges) {
            if (e.u >= n || e.v >= n) {
                throw std::invalid_argument("edge endpoint out of range");
            }
            if (e.u == e.v) {
                throw std::invalid_argument("self-loops are not allowed");
            }
            if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
                throw std::invalid_argument("edge weights must be positive and finite");
            }
            canon.push_back({std::min(e.u, e.v), std::max(e.u, e.v), e.weight});
        }
        std::sort(canon.begin(), canon.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
            return a.u != b.u ? a.u < b.u : a.v < b.v;
        });
        std::vector<WeightedEdge> merged;
        merged.reserve(canon.size());
        for (const auto& e : canon) {
            if (!merged.empty() && merged.back().u == e.u && merged.back().v == e.v) {
                merged.back().weight += e.weight;
            } else {
                merged.push_back(e);
            }
        }

        SparseGraph g;
        g.n_ = n;
        g.edge_count_ = merged.size();
        g.offsets_.assign(n + 1, 0);
        for (const auto& e : merged) {
            ++g.offsets_[e.u + 1];
            ++g.offsets_[e.v + 1];
        }
        std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
        g.neighbors_.resize(2 * merged.size());
        g.weights_.resize(2 * merged.size());
        std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
        // merged is sorted by (u, v): lower neighbors of every node arrive in
        // ascending order first, then the upper ones, so rows come out sorted.
        for (const auto& e : merged) {
            g.neighbors_[cursor[e.v]] = e.u;
            g.weights_[cursor[e.v]++] = e.weight;
        }
        for (const auto& e : merged) {
            g.neighbors_[cursor[e.u]] = e.v;
            g.weights_[cursor[e.u]++] = e.weight;
        }
        g.degrees_.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (auto k = g.offsets_[i]; k < g.offsets_[i + 1]; ++k) g.degrees_[i] += g.weights_[k];
        }
        return g;
    }

    static SparseGraph from_edges(std::size_t n, std::span<const std::pair<NodeId, NodeId>> pairs) {
        std::vector<WeightedEdge> edges;
        edges.reserve(pairs.size());
        for (auto [u, v] : pairs) edges.push_back({u, v, 1.0});
        return from_edges(n, std::span<const WeightedEdge>(edges));
    }

    std::size_t size() const { return n_; }
    std::size_t edge_count() const { return edge_count_; }
    std::size_t stored_entries() const { return neighbors_.size(); }

    std::span<const NodeId> neighbors(std::size_t i) const {
        return {neighbors_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }
    std::span<const double> weights(std::size_t i) const {
        return {weights_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }

    /// Weighted degree d_i = sum_j w_ij.
    double degree(std::size_t i) const { return degrees_[i]; }
    std::span<const double> degrees() const { return degrees_; }

    double weight(std::size_t i, std::size_t j) const {
        auto nb = neighbors(i);
        auto it = std::lower_bound(nb.begin(), nb.end(), static_cast<NodeId>(j));
        if (it == nb.end() || *it != j) return 0.0;
        return weights(i)[static_cast<std::size_t>(it - nb.begin())];
    }
    bool has_edge(std::size_t i, std::size_t j) const { return weight(i, j) > 0.0; }

    /// Undirected edges with u < v, sorted.
    std::vector<WeightedEdge> edges() const {
        std::vector<WeightedEdge> out;
        out.reserve(edge_count_);
        for (std::size_t i = 0; i < n_; ++i) {
            auto nb = neighbors(i);
            auto w = weights(i);
            for (std::size_t k = 0; k < nb.size(); ++k) {
                if (nb[k] > i) out.push_back({static_cast<NodeId>(i), nb[k], w[k]});
            }
        }
        return out;
    }

    std::size_t isolated_count() const {
        return static_cast<std::size_t>(std::count(degrees_.begin(), degrees_.end(), 0.0));
    }

    friend bool operator==(const SparseGraph& a, const SparseGraph& b) {
        return a.n_ == b.n_ && a.offsets_ == b.offsets_ && a.neighbors_ == b.neighbors_ &&
               a.weights_ == b.weights_;
    }

private:
    std::size_t n_ = 0;
    std::size_t edge_count_ = 0;
    std::vector<std::size_t> offsets_{0};
    std::vector<NodeId> neighbors_;
    std::vector<double> weights_;
    std::vector<double> degrees_;
};

/// Component label per node (labels are 0..k-1 in order of first node).
inline std::vector<std::size_t> component_labels(const SparseGraph& g) {
    constexpr auto unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> label(g.size(), unset);
    std::size_t next = 0;
    std::queue<std::size_t> frontier;
    for (std::size_t s = 0; s < g.size(); ++s) {
        if (label[s] != unset) continue;
        label[s] = next;
        frontier.push(s);
        while (!frontier.empty()) {
            auto i = frontier.front();
            frontier.pop();
            for (auto j : g.neighbors(i)) {
                if (label[j] == unset) {
                    label[j] = next;
                    frontier.push(j);
                }
            }
        }
        ++next;
    }
    return label;
}

inline std::size_t connected_components(const SparseGraph& g) {
    auto labels = component_labels(g);
    return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

} // namespace spectral
