#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "spectral/graph.hpp"

namespace spectral {

struct ErdosRenyi {
    double p = 0.0;
};

/// Ring of n nodes, each joined to its k nearest neighbours (k/2 per side),
/// every lattice edge rewired with probability p.
struct WattsStrogatz {
    std::size_t k = 4;
    double p = 0.0;
};

/// Preferential attachment; every arriving node brings r edges.
struct BarabasiAlbert {
    std::size_t r = 1;
};

struct CompleteGraph {};

using ClusterModel = std::variant<CompleteGraph, ErdosRenyi, WattsStrogatz, BarabasiAlbert>;

/// Disjoint clusters joined by `inter_edges` edges drawn uniformly, without
/// replacement, among node pairs that lie in different clusters.
struct PlantedClusters {
    std::vector<std::size_t> sizes;
    ClusterModel intra = CompleteGraph{};
    std::size_t inter_edges = 0;
};

using GraphModel = std::variant<ErdosRenyi, WattsStrogatz, BarabasiAlbert, PlantedClusters>;

struct GeneratedGraph {
    SparseGraph graph;
    std::optional<std::size_t> ground_truth_clusters;
    std::vector<std::size_t> membership;  // planted models only
};

using Rng = std::mt19937_64;

namespace detail {

inline std::vector<std::pair<NodeId, NodeId>> erdos_renyi_pairs(std::size_t n, double p, Rng& rng) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    if (p <= 0.0 || n < 2) return edges;
    if (p >= 1.0) {
        for (std::size_t v = 1; v < n; ++v)
            for (std::size_t w = 0; w < v; ++w) edges.emplace_back(static_cast<NodeId>(v), static_cast<NodeId>(w));
        return edges;
    }
    // Geometric skipping over the lower triangle (Batagelj & Brandes).
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double log_q = std::log1p(-p);
    std::int64_t v = 1, w = -1;
    const auto nn = static_cast<std::int64_t>(n);
    while (v < nn) {
        double r = unif(rng);
        w += 1 + static_cast<std::int64_t>(std::floor(std::log1p(-r) / log_q));
        while (w >= v && v < nn) {
            w -= v;
            ++v;
        }
        if (v < nn) edges.emplace_back(static_cast<NodeId>(v), static_cast<NodeId>(w));
    }
    return edges;
}

inline std::vector<std::pair<NodeId, NodeId>> watts_strogatz_pairs(std::size_t n, std::size_t k, double p, Rng& rng) {
    std::vector<std::set<NodeId>> adj(n);
    auto link = [&](std::size_t a, std::size_t b) {
        adj[a].insert(static_cast<NodeId>(b));
        adj[b].insert(static_cast<NodeId>(a));
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 1; j <= k / 2; ++j) link(i, (i + j) % n);

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t j = 1; j <= k / 2; ++j) {
        for (std::size_t u = 0; u < n; ++u) {
            std::size_t v = (u + j) % n;
            if (unif(rng) >= p) continue;
            if (!adj[u].count(static_cast<NodeId>(v))) continue;  // already rewired away
            if (adj[u].size() >= n - 1) continue;
            std::size_t w = pick(rng);
            while (w == u || adj[u].count(static_cast<NodeId>(w))) w = pick(rng);
            adj[u].erase(static_cast<NodeId>(v));
            adj[v].erase(static_cast<NodeId>(u));
            link(u, w);
        }
    }
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (std::size_t u = 0; u < n; ++u)
        for (auto v : adj[u])
            if (v > u) edges.emplace_back(static_cast<NodeId>(u), v);
    return edges;
}

inline std::vector<std::pair<NodeId, NodeId>> barabasi_albert_pairs(std::size_t n, std::size_t r, Rng& rng) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::vector<NodeId> repeated;  // node i appears deg(i) times
    // Seed with a star on r + 1 nodes.
    for (std::size_t leaf = 1; leaf <= r; ++leaf) {
        edges.emplace_back(0, static_cast<NodeId>(leaf));
        repeated.push_back(0);
        repeated.push_back(static_cast<NodeId>(leaf));
    }
    std::vector<NodeId> targets;
    std::vector<char> chosen(n, 0);
    for (std::size_t source = r + 1; source < n; ++source) {
        targets.clear();
        std::uniform_int_distribution<std::size_t> pick(0, repeated.size() - 1);
        while (targets.size() < r) {
            NodeId t = repeated[pick(rng)];
            if (!chosen[t]) {
                chosen[t] = 1;
                targets.push_back(t);
            }
        }
        for (auto t : targets) {
            chosen[t] = 0;
            edges.emplace_back(static_cast<NodeId>(source), t);
            repeated.push_back(t);
            repeated.push_back(static_cast<NodeId>(source));
        }
    }
    return edges;
}

inline void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + ": p must lie in [0, 1]");
}

inline void check_watts_strogatz(std::size_t n, const WattsStrogatz& m) {
    check_probability(m.p, "watts_strogatz");
    if (m.k % 2 != 0) throw std::invalid_argument("watts_strogatz: k must be even");
    if (m.k >= n) throw std::invalid_argument("watts_strogatz: k must be smaller than n");
}

inline void check_barabasi_albert(std::size_t n, const BarabasiAlbert& m) {
    if (m.r < 1 || m.r >= n) throw std::invalid_argument("barabasi_albert: r must satisfy 1 <= r < n");
}

inline std::vector<std::pair<NodeId, NodeId>> cluster_pairs(const ClusterModel& model, std::size_t n, Rng& rng) {
    struct Visitor {
        std::size_t n;
        Rng& rng;
        std::vector<std::pair<NodeId, NodeId>> operator()(const CompleteGraph&) const {
            return erdos_renyi_pairs(n, 1.0, rng);
        }
        std::vector<std::pair<NodeId, NodeId>> operator()(const ErdosRenyi& m) const {
            check_probability(m.p, "erdos_renyi");
            return erdos_renyi_pairs(n, m.p, rng);
        }
        std::vector<std::pair<NodeId, NodeId>> operator()(const WattsStrogatz& m) const {
            check_watts_strogatz(n, m);
            return watts_strogatz_pairs(n, m.k, m.p, rng);
        }
        std::vector<std::pair<NodeId, NodeId>> operator()(const BarabasiAlbert& m) const {
            check_barabasi_albert(n, m);
            return barabasi_albert_pairs(n, m.r, rng);
        }
    };
    return std::visit(Visitor{n, rng}, model);
}

} // namespace detail

inline SparseGraph erdos_renyi(std::size_t n, double p, Rng& rng) {
    detail::check_probability(p, "erdos_renyi");
    auto pairs = detail::erdos_renyi_pairs(n, p, rng);
    return SparseGraph::from_edges(n, std::span<const std::pair<NodeId, NodeId>>(pairs));
}

inline SparseGraph watts_strogatz(std::size_t n, std::size_t k, double p, Rng& rng) {
    detail::check_watts_strogatz(n, {k, p});
    auto pairs = detail::watts_strogatz_pairs(n, k, p, rng);
    return SparseGraph::from_edges(n, std::span<const std::pair<NodeId, NodeId>>(pairs));
}

inline SparseGraph barabasi_albert(std::size_t n, std::size_t r, Rng& rng) {
    detail::check_barabasi_albert(n, {r});
    auto pairs = detail::barabasi_albert_pairs(n, r, rng);
    return SparseGraph::from_edges(n, std::span<const std::pair<NodeId, NodeId>>(pairs));
}

inline GeneratedGraph planted_clusters(const PlantedClusters& model, Rng& rng) {
    if (model.sizes.empty()) throw std::invalid_argument("planted_clusters: at least one cluster required");
    std::size_t n = 0;
    for (auto s : model.sizes) {
        if (s == 0) throw std::invalid_argument("planted_clusters: empty cluster");
        n += s;
    }
    GeneratedGraph out;
    out.membership.resize(n);
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::size_t offset = 0;
    for (std::size_t c = 0; c < model.sizes.size(); ++c) {
        const auto size = model.sizes[c];
        for (std::size_t i = 0; i < size; ++i) out.membership[offset + i] = c;
        if (size >= 2) {
            for (auto [u, v] : detail::cluster_pairs(model.intra, size, rng)) {
                edges.emplace_back(static_cast<NodeId>(u + offset), static_cast<NodeId>(v + offset));
            }
        }
        offset += size;
    }

    if (model.inter_edges > 0) {
        // Number of cross-cluster pairs = (n^2 - sum s^2) / 2.
        long double cross = static_cast<long double>(n) * n;
        for (auto s : model.sizes) cross -= static_cast<long double>(s) * s;
        cross /= 2;
        if (static_cast<long double>(model.inter_edges) > cross) {
            throw std::invalid_argument("planted_clusters: more inter-cluster edges than cross pairs");
        }
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::set<std::pair<NodeId, NodeId>> added;
        while (added.size() < model.inter_edges) {
            auto a = static_cast<NodeId>(pick(rng));
            auto b = static_cast<NodeId>(pick(rng));
            if (out.membership[a] == out.membership[b]) continue;
            added.insert({std::min(a, b), std::max(a, b)});
        }
        edges.insert(edges.end(), added.begin(), added.end());
    }
    out.graph = SparseGraph::from_edges(n, std::span<const std::pair<NodeId, NodeId>>(edges));
    out.ground_truth_clusters = model.sizes.size();
    return out;
}

/// Deterministic for a fixed seed. For planted models `n` must equal the sum
/// of the cluster sizes (or be zero, meaning "whatever the sizes add up to").
inline GeneratedGraph generate(const GraphModel& model, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    if (const auto* planted = std::get_if<PlantedClusters>(&model)) {
        std::size_t total = 0;
        for (auto s : planted->sizes) total += s;
        if (n != 0 && n != total) throw std::invalid_argument("planted_clusters: n differs from the sum of sizes");
        if (total < 2) throw std::invalid_argument("generate: n must be at least 2");
        return planted_clusters(*planted, rng);
    }
    if (n < 2) throw std::invalid_argument("generate: n must be at least 2");
    GeneratedGraph out;
    if (const auto* er = std::get_if<ErdosRenyi>(&model)) {
        out.graph = erdos_renyi(n, er->p, rng);
    } else if (const auto* ws = std::get_if<WattsStrogatz>(&model)) {
        out.graph = watts_strogatz(n, ws->k, ws->p, rng);
    } else {
        out.graph = barabasi_albert(n, std::get<BarabasiAlbert>(model).r, rng);
    }
    return out;
}

} // namespace spectral
