#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spectral/graph.hpp"

namespace spectral {

class EdgeListError : public std::runtime_error {
public:
    EdgeListError(const std::string& what, std::size_t line)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r' || s[i] == ',')) ++i;
        std::size_t j = i;
        while (j < s.size() && !(s[j] == ' ' || s[j] == '\t' || s[j] == '\r' || s[j] == ',')) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

inline bool parse_id(std::string_view s, std::int64_t& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

inline bool parse_weight(std::string_view s, double& out) {
    // std::from_chars for double is not available everywhere on GCC 11.
    std::string tmp(s);
    char* end = nullptr;
    out = std::strtod(tmp.c_str(), &end);
    return end == tmp.c_str() + tmp.size() && std::isfinite(out);
}

} // namespace detail

/// Reads a SNAP-style edge list: '#' or '%' comment lines, whitespace
/// separated integer pairs, optional positive weight in the third column.
///
/// Node ids are compacted to [0, n) in ascending order of the original id.
/// The two orientations of a pair are canonicalized: repeated identical
/// directed lines add up, and the undirected weight is the larger of the two
/// directed totals, so a file listing every edge in both directions yields
/// unit weights. Self-loops are dropped. A `# nodes: N` comment (as written
/// by write_edge_list) keeps the node count when all ids lie in [0, N).
inline SparseGraph read_edge_list(std::istream& in, std::vector<std::int64_t>* original_ids = nullptr) {
    std::map<std::pair<std::int64_t, std::int64_t>, double> directed;
    std::vector<std::int64_t> ids;
    std::int64_t declared_nodes = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        auto first = view.find_first_not_of(" \t\r");
        if (first == std::string_view::npos) continue;
        if (view[first] == '#' || view[first] == '%') {
            auto pos = view.find("nodes:");
            if (pos != std::string_view::npos) {
                auto rest = detail::split_fields(view.substr(pos + 6));
                std::int64_t declared = 0;
                if (!rest.empty() && detail::parse_id(rest[0], declared) && declared > 0) {
                    declared_nodes = declared;
                }
            }
            continue;
        }
        auto fields = detail::split_fields(view);
        if (fields.size() < 2 || fields.size() > 3) {
            throw EdgeListError("expected 'src dst [weight]'", line_no);
        }
        std::int64_t a = 0, b = 0;
        if (!detail::parse_id(fields[0], a) || !detail::parse_id(fields[1], b)) {
            throw EdgeListError("node ids must be integers", line_no);
        }
        double w = 1.0;
        if (fields.size() == 3 && (!detail::parse_weight(fields[2], w) || !(w > 0.0))) {
            throw EdgeListError("weight must be a positive finite number", line_no);
        }
        ids.push_back(a);
        ids.push_back(b);
        if (a == b) continue;
        directed[{a, b}] += w;
    }
    if (ids.empty()) {
        if (declared_nodes == 0) throw EdgeListError("edge list is empty", 0);
        ids.push_back(0);
    }

    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (declared_nodes > 0 && ids.front() >= 0 && ids.back() < declared_nodes) {
        // A '# nodes: N' header with ids inside [0, N) keeps isolated nodes.
        ids.resize(static_cast<std::size_t>(declared_nodes));
        std::iota(ids.begin(), ids.end(), std::int64_t{0});
    }
    auto index_of = [&](std::int64_t id) {
        return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
    };

    std::vector<WeightedEdge> edges;
    edges.reserve(directed.size());
    for (const auto& [key, w] : directed) {
        auto [a, b] = key;
        auto reverse = directed.find({b, a});
        if (reverse != directed.end()) {
            if (a > b) continue;  // handled from the (b, a) side
            edges.push_back({index_of(a), index_of(b), std::max(w, reverse->second)});
        } else {
            edges.push_back({index_of(a), index_of(b), w});
        }
    }
    if (original_ids) *original_ids = ids;
    return SparseGraph::from_edges(ids.size(), std::span<const WeightedEdge>(edges));
}

inline SparseGraph load_edge_list(const std::string& path, std::vector<std::int64_t>* original_ids = nullptr) {
    std::ifstream in(path);
    if (!in) throw EdgeListError("cannot open " + path, 0);
    return read_edge_list(in, original_ids);
}

/// Writes `u v` lines (and a weight column when any weight differs from 1).
/// Isolated nodes cannot be expressed in the format; a `# nodes:` header
/// records the node count for readers that care.
inline void write_edge_list(const SparseGraph& g, std::ostream& out,
                            const std::vector<std::string>& comments = {}) {
    auto edges = g.edges();
    for (const auto& c : comments) out << "# " << c << '\n';
    out << "# nodes: " << g.size() << " edges: " << g.edge_count() << '\n';
    bool weighted = std::any_of(edges.begin(), edges.end(), [](const WeightedEdge& e) { return e.weight != 1.0; });
    std::ostringstream buf;
    buf.precision(17);
    for (const auto& e : edges) {
        buf << e.u << ' ' << e.v;
        if (weighted) buf << ' ' << e.weight;
        buf << '\n';
    }
    out << buf.str();
}

} // namespace spectral
