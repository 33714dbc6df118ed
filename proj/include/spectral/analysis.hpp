#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spectral/generators.hpp"
#include "spectral/laplacian.hpp"
#include "spectral/maxent.hpp"
#include "spectral/moments.hpp"

namespace spectral {

struct EslConfig {
    std::size_t m = 30;
    ProbeConfig probes;
    SolverConfig solver;
    Basis basis = Basis::chebyshev;
};

struct EslResult {
    MomentVector moments;
    MaxEntDensity density;
};

/// Laplacian, stochastic moments and MaxEnt fit in one call.
inline EslResult esl(const SparseGraph& g, const EslConfig& cfg) {
    if (cfg.m < 2) throw std::invalid_argument("esl: need at least three multipliers (order >= 2)");
    auto op = normalized_laplacian(g);
    EslResult out;
    out.moments = estimate_moments(op, cfg.m, cfg.probes, cfg.basis);
    out.density = fit_maxent(out.moments, cfg.solver);
    return out;
}

inline double symmetric_kl(const EslResult& a, const EslResult& b) {
    return symmetric_kl(a.density, b.density, a.moments, b.moments);
}

struct SimilarityMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> values;
    std::vector<bool> flagged;  // fit did not converge; entries still computed
    std::vector<FitReport> reports;
    std::size_t m = 0;
    std::size_t probes = 0;

    std::size_t size() const { return labels.size(); }
};

/// Pairwise symmetric KL between the MaxEnt densities of the given graphs.
/// The diagonal is zero by construction.
inline SimilarityMatrix similarity_matrix(const std::vector<SparseGraph>& graphs, std::vector<std::string> labels,
                                          const EslConfig& cfg) {
    if (graphs.size() < 2) throw std::invalid_argument("similarity_matrix: need at least two graphs");
    if (labels.empty()) {
        for (std::size_t i = 0; i < graphs.size(); ++i) labels.push_back("g" + std::to_string(i));
    }
    if (labels.size() != graphs.size()) throw std::invalid_argument("similarity_matrix: label count mismatch");
    const std::size_t k = graphs.size();
    std::vector<EslResult> fits;
    fits.reserve(k);
    for (const auto& g : graphs) fits.push_back(esl(g, cfg));

    SimilarityMatrix out;
    out.labels = std::move(labels);
    out.m = cfg.m;
    out.probes = cfg.probes.probes;
    out.values.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        out.flagged.push_back(!fits[i].density.fit_report().converged);
        out.reports.push_back(fits[i].density.fit_report());
        for (std::size_t j = i + 1; j < k; ++j) {
            const double v = symmetric_kl(fits[i], fits[j]);
            out.values[i][j] = v;
            out.values[j][i] = v;
        }
    }
    return out;
}

enum class ModelFamily { erdos_renyi, watts_strogatz, barabasi_albert };

inline std::string_view to_string(ModelFamily f) {
    switch (f) {
        case ModelFamily::erdos_renyi: return "erdos_renyi";
        case ModelFamily::watts_strogatz: return "watts_strogatz";
        case ModelFamily::barabasi_albert: return "barabasi_albert";
    }
    return "unknown";
}

inline ModelFamily parse_model_family(std::string_view s) {
    if (s == "erdos_renyi" || s == "er") return ModelFamily::erdos_renyi;
    if (s == "watts_strogatz" || s == "ws") return ModelFamily::watts_strogatz;
    if (s == "barabasi_albert" || s == "ba") return ModelFamily::barabasi_albert;
    throw std::invalid_argument("unknown model family '" + std::string(s) + "' (expected er|ws|ba)");
}

/// Generator for one family at one parameter value. For Barabasi-Albert the
/// parameter is the number of edges each arriving node attaches.
inline GraphModel make_model(ModelFamily family, double parameter, std::size_t ws_neighbors = 4) {
    switch (family) {
        case ModelFamily::erdos_renyi: return ErdosRenyi{parameter};
        case ModelFamily::watts_strogatz: return WattsStrogatz{ws_neighbors, parameter};
        case ModelFamily::barabasi_albert: {
            if (!(parameter >= 1.0) || parameter != std::floor(parameter)) {
                throw std::invalid_argument("barabasi_albert parameter must be a positive integer");
            }
            return BarabasiAlbert{static_cast<std::size_t>(parameter)};
        }
    }
    throw std::invalid_argument("make_model: unknown family");
}

/// Probabilities 0.05, 0.10, ..., 0.95 for ER and WS; for BA every integer
/// r in [1, min(n/2, 20)] followed by roughly log-spaced integers up to n/2.
inline std::vector<double> default_grid(ModelFamily family, std::size_t n) {
    std::vector<double> grid;
    if (family != ModelFamily::barabasi_albert) {
        for (int k = 1; k <= 19; ++k) grid.push_back(std::round(k * 0.05 * 1e9) / 1e9);
        return grid;
    }
    const std::size_t top = std::max<std::size_t>(1, n / 2);
    for (std::size_t r = 1; r <= std::min<std::size_t>(top, 20); ++r) grid.push_back(static_cast<double>(r));
    double r = 20.0;
    while (true) {
        r *= 1.15;
        const double v = std::round(r);
        if (v > static_cast<double>(top)) break;
        if (v > grid.back()) grid.push_back(v);
    }
    if (grid.back() < static_cast<double>(top)) grid.push_back(static_cast<double>(top));
    return grid;
}

struct InferenceConfig {
    EslConfig esl;
    std::size_t replicates = 10;
    std::uint64_t graph_seed = 0;  // replicate r uses graph_seed + r
    std::size_t ws_neighbors = 4;
};

struct InferenceResult {
    ModelFamily family = ModelFamily::erdos_renyi;
    std::vector<double> grid;
    std::vector<double> divergences;  // replicate-averaged symmetric KL
    std::size_t best_index = 0;
    double best_parameter = 0.0;
    std::size_t replicates = 0;
    std::size_t unconverged_fits = 0;

    double best_divergence() const { return divergences.at(best_index); }
};

/// Mean symmetric KL between `reference` and replicate draws of each grid
/// model; the estimate is the grid argmin.
inline InferenceResult infer_parameter(const EslResult& reference, ModelFamily family, std::size_t n,
                                       const std::vector<double>& grid, const InferenceConfig& cfg) {
    if (grid.empty()) throw std::invalid_argument("infer_parameter: empty grid");
    if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("infer_parameter: grid must be sorted");
    if (cfg.replicates < 1) throw std::invalid_argument("infer_parameter: need at least one replicate");
    InferenceResult out;
    out.family = family;
    out.grid = grid;
    out.replicates = cfg.replicates;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        const auto model = make_model(family, grid[gi], cfg.ws_neighbors);
        double acc = 0.0;
        for (std::size_t r = 0; r < cfg.replicates; ++r) {
            const auto candidate = generate(model, n, cfg.graph_seed + r);
            const auto fit = esl(candidate.graph, cfg.esl);
            if (!fit.density.fit_report().converged) ++out.unconverged_fits;
            acc += symmetric_kl(reference, fit);
        }
        const double mean = acc / static_cast<double>(cfg.replicates);
        out.divergences.push_back(mean);
        if (mean < best) {
            best = mean;
            out.best_index = gi;
        }
    }
    out.best_parameter = grid[out.best_index];
    return out;
}

inline InferenceResult infer_parameter(const SparseGraph& reference, ModelFamily family, std::size_t n,
                                       const std::vector<double>& grid, const InferenceConfig& cfg) {
    return infer_parameter(esl(reference, cfg.esl), family, n, grid, cfg);
}

struct ClassificationEntry {
    ModelFamily family;
    double best_parameter = 0.0;
    double divergence = 0.0;
    InferenceResult curve;
};

/// Ranks model families by their smallest grid divergence to the target.
inline std::vector<ClassificationEntry> classify_network(const SparseGraph& target,
                                                         const std::vector<ModelFamily>& families,
                                                         std::size_t n_match,
                                                         const std::vector<std::vector<double>>& grids,
                                                         const InferenceConfig& cfg) {
    if (families.empty()) throw std::invalid_argument("classify_network: no model families");
    if (grids.size() != families.size()) throw std::invalid_argument("classify_network: one grid per family required");
    const auto reference = esl(target, cfg.esl);
    std::vector<ClassificationEntry> out;
    for (std::size_t f = 0; f < families.size(); ++f) {
        auto curve = infer_parameter(reference, families[f], n_match, grids[f], cfg);
        out.push_back({families[f], curve.best_parameter, curve.best_divergence(), std::move(curve)});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const ClassificationEntry& a, const ClassificationEntry& b) { return a.divergence < b.divergence; });
    return out;
}

} // namespace spectral
