#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spectral/grid.hpp"
#include "spectral/kernel_smoothing.hpp"
#include "spectral/lanczos.hpp"
#include "spectral/laplacian.hpp"
#include "spectral/maxent.hpp"
#include "spectral/moments.hpp"

namespace spectral {

/// Density with first and second derivatives on a uniform grid of [0,1].
struct DensityProfile {
    double step = 1e-4;
    std::vector<double> p, dp, d2p;

    UniformGrid grid() const { return UniformGrid(step); }
};

/// Analytic derivatives of the exponential-polynomial form.
inline DensityProfile density_profile(const MaxEntDensity& density, double grid_step) {
    UniformGrid grid(grid_step);
    DensityProfile prof;
    prof.step = grid_step;
    prof.p.resize(grid.size());
    prof.dp.resize(grid.size());
    prof.d2p.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) density.derivatives(grid.point(i), prof.p[i], prof.dp[i], prof.d2p[i]);
    return prof;
}

/// Central differences (one-sided at the ends) of tabulated values.
inline DensityProfile density_profile(std::vector<double> values, double grid_step) {
    UniformGrid grid(grid_step);
    if (values.size() != grid.size()) throw std::invalid_argument("density_profile: value count does not match grid");
    const std::size_t g = values.size();
    const double h = grid.step();
    DensityProfile prof;
    prof.step = grid_step;
    prof.dp.resize(g);
    prof.d2p.resize(g);
    for (std::size_t i = 1; i + 1 < g; ++i) {
        prof.dp[i] = (values[i + 1] - values[i - 1]) / (2.0 * h);
        prof.d2p[i] = (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (h * h);
    }
    prof.dp[0] = (values[1] - values[0]) / h;
    prof.dp[g - 1] = (values[g - 1] - values[g - 2]) / h;
    prof.d2p[0] = prof.d2p[1];
    prof.d2p[g - 1] = prof.d2p[g - 2];
    prof.p = std::move(values);
    return prof;
}

inline DensityProfile density_profile(const SmoothedDensity& density) {
    return density_profile(density.values, density.grid_step);
}

struct ClusterConfig {
    /// Absolute derivative tolerance; when unset, relative_eta * max|p'|.
    std::optional<double> eta;
    double relative_eta = 1e-3;
    /// A minimum counts as a gap only when p there is at most this fraction
    /// of the mean density level (which is 1 on [0,1]).
    double gap_depth = 1e-2;
    /// Minimum width of the stretch around the minimum where p stays at or
    /// below gap_depth; narrower dips between resolved eigenvalues are not gaps.
    double gap_width = 1e-2;
    double grid_step = 1e-4;
};

struct ClusterEstimate {
    double n_c = 0.0;                 // n * integral_0^lambda* p
    long long n_c_rounded = 0;
    double lambda_star = 0.0;
    bool gap_found = false;
    double eta = 0.0;
    std::size_t n = 0;
};

/// Locates the first interior minimum of p scanning from the origin: either
/// p' changes sign from negative to positive, or |p'| <= eta with p'' > 0.
/// A minimum is the gap when it is deep (see ClusterConfig::gap_depth) and p
/// later rises above its value there.
inline ClusterEstimate estimate_clusters(const DensityProfile& prof, std::size_t n, const ClusterConfig& cfg = {}) {
    if (n < 1) throw std::invalid_argument("estimate_clusters: n must be positive");
    UniformGrid grid(prof.step);
    const std::size_t g = grid.size();
    if (prof.p.size() != g || prof.dp.size() != g || prof.d2p.size() != g) {
        throw std::invalid_argument("estimate_clusters: malformed density profile");
    }
    ClusterEstimate est;
    est.n = n;
    double max_slope = 0.0;
    for (double v : prof.dp) {
        if (std::isfinite(v)) max_slope = std::max(max_slope, std::abs(v));
    }
    est.eta = cfg.eta ? *cfg.eta : cfg.relative_eta * max_slope;

    // Candidate minima in scan order; the first one that is deep enough and
    // is followed by a rise is the gap.
    auto accept = [&](std::size_t s) {
        if (!(prof.p[s] <= cfg.gap_depth)) return false;
        std::size_t lo = s, hi = s;
        while (lo > 0 && prof.p[lo - 1] <= cfg.gap_depth) --lo;
        while (hi + 1 < g && prof.p[hi + 1] <= cfg.gap_depth) ++hi;
        if (static_cast<double>(hi - lo) * prof.step < cfg.gap_width) return false;
        double later = 0.0;
        for (std::size_t k = s + 1; k < g; ++k) later = std::max(later, prof.p[k]);
        return later > prof.p[s] * (1.0 + 1e-9) && later > 0.0;
    };

    std::optional<std::size_t> star;
    std::size_t last_negative = 0;
    bool descending = false;
    for (std::size_t i = 1; i + 1 < g && !star; ++i) {
        const double d = prof.dp[i];
        if (d < 0.0 && std::abs(d) > est.eta) {
            descending = true;
            last_negative = i;
            continue;
        }
        if (descending && d > 0.0) {
            // Sign change: take the lowest point of the bracket (handles
            // flat stretches where the density underflows).
            std::size_t best = last_negative;
            for (std::size_t k = last_negative; k <= i; ++k) {
                if (prof.p[k] < prof.p[best]) best = k;
            }
            descending = false;
            if (accept(best)) star = best;
            continue;
        }
        if (std::abs(d) <= est.eta && prof.d2p[i] > 0.0 && accept(i)) star = i;
    }
    if (!star) return est;

    const std::size_t s = *star;
    est.gap_found = true;
    est.lambda_star = grid.point(s);
    est.n_c = static_cast<double>(n) * grid.integrate_prefix(prof.p, s);
    est.n_c_rounded = std::llround(est.n_c);
    return est;
}

inline ClusterEstimate estimate_clusters(const MaxEntDensity& density, std::size_t n, const ClusterConfig& cfg = {}) {
    return estimate_clusters(density_profile(density, cfg.grid_step), n, cfg);
}

inline ClusterEstimate estimate_clusters(const SmoothedDensity& density, std::size_t n, const ClusterConfig& cfg = {}) {
    return estimate_clusters(density_profile(density), n, cfg);
}

struct DetectorConfig {
    SolverConfig solver;
    ClusterConfig cluster;
    double sigma = 1e-3;
    Basis basis = Basis::chebyshev;
};

struct ArmResult {
    ClusterEstimate estimate;
    std::optional<double> error;  // |n_c - truth| / truth; empty when no gap
};

struct DetectorComparison {
    std::size_t truth = 0;
    std::size_t m = 0;
    ArmResult maxent;
    ArmResult lanczos;
    FitReport fit_report;
    std::size_t lanczos_breakdowns = 0;
};

inline ArmResult score_arm(const ClusterEstimate& est, std::size_t truth) {
    ArmResult arm{est, std::nullopt};
    if (est.gap_found) arm.error = std::abs(est.n_c - static_cast<double>(truth)) / static_cast<double>(truth);
    return arm;
}

/// Runs both detectors with the same matvec budget: m moments from
/// cfg.probes probes versus m Lanczos steps from the same probe vectors.
inline DetectorComparison compare_detectors(const SparseGraph& g, std::size_t truth, std::size_t m,
                                            const ProbeConfig& probes, const DetectorConfig& cfg = {}) {
    if (truth < 1) throw std::invalid_argument("compare_detectors: truth must be at least 1");
    auto op = normalized_laplacian(g);
    DetectorComparison out;
    out.truth = truth;
    out.m = m;

    const auto mv = estimate_moments(op, m, probes, cfg.basis);
    const auto density = fit_maxent(mv, cfg.solver);
    out.fit_report = density.fit_report();
    out.maxent = score_arm(estimate_clusters(density, g.size(), cfg.cluster), truth);

    const auto ds = lanczos_spectrum(op, std::min(m, g.size()), probes);
    out.lanczos_breakdowns = ds.breakdowns;
    const auto smooth = kernel_smooth(ds, cfg.sigma, cfg.cluster.grid_step);
    out.lanczos = score_arm(estimate_clusters(smooth, g.size(), cfg.cluster), truth);
    return out;
}

} // namespace spectral
