// Acceptance runner: one check per criterion, one PASS/FAIL line each.
//
//   acceptance                 run every criterion
//   acceptance --criterion N   run criterion N only

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "spectral/spectral.hpp"

using namespace spectral;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

template <typename... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double basis_phi(Basis b, int k, double x) { return b == Basis::power ? std::pow(x, k) : oracle::shifted_chebyshev(k, x); }

// ---- 1 ---------------------------------------------------------------------

Outcome semicircle_fit() {
    auto truth = [](double x) { return oracle::semicircle(x, 0.5, 0.5); };
    auto kl_true_fit = [&](const MaxEntDensity& p) {
        return oracle::integrate(
            [&](double x) {
                const double t = truth(x);
                return t > 0.0 ? t * (std::log(t) + p.exponent(x)) : 0.0;
            },
            0.0, 1.0, 256);
    };
    const auto p5 = fit_maxent(semicircle_moments(0.5, 0.5, 5, Basis::chebyshev));
    const auto p30 = fit_maxent(semicircle_moments(0.5, 0.5, 30, Basis::chebyshev));
    const double kl5 = kl_true_fit(p5), kl30 = kl_true_fit(p30);
    const bool ok = p5.fit_report().converged && p30.fit_report().converged && kl30 < kl5 && kl30 < 1e-2;
    return {ok, fmt("KL(m=5)=%.3e KL(m=30)=%.3e converged=%d/%d", kl5, kl30, p5.fit_report().converged,
                    p30.fit_report().converged)};
}

// ---- 2 ---------------------------------------------------------------------

/// Moment of the Gaussian mixture by per-atom Gauss-Kronrod quadrature.
double mixture_moment(const DiracSpectrum& ds, double sigma, int k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const double c = ds.nodes[i];
        acc += ds.weights[i] * oracle::integrate(
                                   [&](double x) {
                                       const double z = (x - c) / sigma;
                                       return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * sigma) *
                                              std::pow(x, k);
                                   },
                                   c - 14.0 * sigma, c + 14.0 * sigma, 4);
    }
    return acc;
}

Outcome smoothing_bias() {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0, analytic_order2 = 0.0, empirical_order2 = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        DiracSpectrum ds;
        const std::size_t atoms = 1 + rng() % 40;
        double total = 0.0;
        for (std::size_t i = 0; i < atoms; ++i) {
            ds.nodes.push_back(u(rng));
            ds.weights.push_back(u(rng) + 0.01);
            total += ds.weights.back();
        }
        for (auto& w : ds.weights) w /= total;
        const double sigma = 1e-3 + 0.05 * u(rng);
        for (int k = 1; k <= 6; ++k) {
            const auto b = smoothed_moment_bias(ds, sigma, static_cast<std::size_t>(k));
            const double oracle_diff = mixture_moment(ds, sigma, k) - b.raw;
            worst = std::max({worst, std::abs(oracle_diff - b.analytic_bias), std::abs(b.smoothed - b.raw - b.analytic_bias)});
            if (k == 2) {
                analytic_order2 = std::max(analytic_order2, std::abs(b.analytic_bias - sigma * sigma) / (sigma * sigma));
                empirical_order2 = std::max(empirical_order2, std::abs(b.smoothed - b.raw - sigma * sigma));
            }
        }
    }
    const bool ok = worst < 1e-8 && analytic_order2 < 1e-14 && empirical_order2 < 1e-8;
    return {ok, fmt("max |bias - analytic| = %.2e; order 2: analytic bias / sigma^2 - 1 = %.1e, "
                    "|smoothed - raw - sigma^2| = %.2e",
                    worst, analytic_order2, empirical_order2)};
}

// ---- 3 ---------------------------------------------------------------------

std::vector<MomentVector> fit_suite() {
    std::vector<MomentVector> out;
    ProbeConfig probes;
    probes.seed = 3;
    for (std::uint64_t s = 0; s < 4; ++s) {
        out.push_back(estimate_moments(normalized_laplacian(generate(ErdosRenyi{0.01 + 0.02 * s}, 500, s).graph), 30, probes));
        out.push_back(estimate_moments(normalized_laplacian(generate(BarabasiAlbert{1 + s}, 500, s).graph), 30, probes));
        out.push_back(estimate_moments(normalized_laplacian(generate(WattsStrogatz{4, 0.1 + 0.2 * s}, 500, s).graph), 20, probes));
        out.push_back(estimate_moments(
            normalized_laplacian(generate(PlantedClusters{{20, 30, 40}, ErdosRenyi{0.5}, s}, 0, s).graph), 40, probes));
        out.push_back(estimate_moments(normalized_laplacian(generate(ErdosRenyi{0.05}, 300, 10 + s).graph), 10, probes,
                                       Basis::power));
    }
    for (std::size_t m : {3u, 5u, 10u, 20u, 30u}) {
        out.push_back(semicircle_moments(0.5, 0.5, m, Basis::chebyshev));
        out.push_back(semicircle_moments(0.45, 0.3, m, Basis::chebyshev));
    }
    for (std::size_t m : {2u, 4u, 6u}) out.push_back(semicircle_moments(0.5, 0.4, m, Basis::power));
    return out;
}

Outcome moment_matching() {
    const auto suite = fit_suite();
    std::size_t converged = 0, failures = 0;
    double worst = 0.0;
    for (const auto& mv : suite) {
        const auto p = fit_maxent(mv);
        if (!p.fit_report().converged) continue;
        ++converged;
        const std::size_t g = 10001;
        const double h = 1.0 / (g - 1);
        std::vector<double> integral(mv.order() + 1, 0.0);
        bool positive = true;
        for (std::size_t i = 0; i < g; ++i) {
            const double x = std::min(1.0, i * h);
            const double v = p(x);
            positive = positive && std::isfinite(v) && v > 0.0;
            const double w = (i == 0 || i + 1 == g) ? 0.5 * h : h;
            for (std::size_t k = 0; k <= mv.order(); ++k) integral[k] += w * v * basis_phi(mv.basis, static_cast<int>(k), x);
        }
        double local = 0.0;
        for (std::size_t k = 0; k <= mv.order(); ++k) local = std::max(local, std::abs(integral[k] - mv.values[k]));
        worst = std::max(worst, local);
        if (!(local < 1e-6) || !positive) ++failures;
    }
    return {failures == 0 && converged > 0,
            fmt("%zu of %zu fits converged; worst moment residual %.2e; failures %zu", converged, suite.size(), worst,
                failures)};
}

// ---- 4 ---------------------------------------------------------------------

Outcome analytic_formulas() {
    SolverConfig cfg;
    cfg.tolerance = 1e-10;
    cfg.grid_step = 1e-5;
    struct Fit {
        MomentVector mu;
        MaxEntDensity p;
    };
    std::vector<Fit> fits;
    for (auto [c, r] : {std::pair{0.5, 0.5}, std::pair{0.4, 0.3}, std::pair{0.6, 0.25}, std::pair{0.45, 0.4},
                        std::pair{0.55, 0.35}, std::pair{0.35, 0.3}, std::pair{0.65, 0.3}}) {
        auto mu = semicircle_moments(c, r, 6, Basis::chebyshev);
        auto p = fit_maxent(mu, cfg);
        if (p.fit_report().converged) fits.push_back({mu, p});
    }
    double worst = 0.0;
    std::size_t pairs = 0;
    bool exact = true;
    for (const auto& f : fits) {
        const double s = oracle::integrate(
            [&](double x) {
                const double v = f.p(x);
                return v > 0.0 ? -v * std::log(v) : 0.0;
            },
            0.0, 1.0, 128);
        worst = std::max(worst, std::abs(entropy_analytic(f.p, f.mu) - s));
        exact = exact && kl_analytic(f.p, f.p, f.mu) == 0.0 && symmetric_kl(f.p, f.p, f.mu, f.mu) == 0.0;
    }
    for (std::size_t i = 0; i < fits.size(); ++i) {
        for (std::size_t j = i + 1; j < fits.size(); ++j) {
            const auto& a = fits[i];
            const auto& b = fits[j];
            auto quad_kl = [](const MaxEntDensity& p, const MaxEntDensity& q) {
                return oracle::integrate([&](double x) { return p(x) * (q.exponent(x) - p.exponent(x)); }, 0.0, 1.0, 128);
            };
            const double qab = quad_kl(a.p, b.p), qba = quad_kl(b.p, a.p);
            worst = std::max({worst, std::abs(kl_analytic(a.p, b.p, a.mu) - qab), std::abs(kl_analytic(b.p, a.p, b.mu) - qba),
                              std::abs(symmetric_kl(a.p, b.p, a.mu, b.mu) - 0.5 * (qab + qba))});
            exact = exact && symmetric_kl(a.p, b.p, a.mu, b.mu) == symmetric_kl(b.p, a.p, b.mu, a.mu);
            ++pairs;
        }
    }
    return {pairs >= 20 && worst < 1e-6 && exact,
            fmt("%zu pairs; worst |analytic - quadrature| = %.2e; exact identities %s", pairs, worst, exact ? "hold" : "FAIL")};
}

// ---- 5 ---------------------------------------------------------------------

Outcome parameter_inference() {
    InferenceConfig cfg;
    cfg.esl.m = 20;
    cfg.esl.probes.probes = 100;
    cfg.esl.probes.seed = 7;
    cfg.replicates = 10;
    cfg.graph_seed = 100;
    const auto er_ref = generate(ErdosRenyi{0.6}, 50, 1001).graph;
    const auto er = infer_parameter(er_ref, ModelFamily::erdos_renyi, 50, default_grid(ModelFamily::erdos_renyi, 50), cfg);
    const auto ws_ref = generate(WattsStrogatz{4, 0.4}, 150, 1001).graph;
    const auto ws = infer_parameter(ws_ref, ModelFamily::watts_strogatz, 150, default_grid(ModelFamily::watts_strogatz, 150), cfg);
    const bool ok = std::abs(er.best_parameter - 0.6) <= 0.05 + 1e-12 && std::abs(ws.best_parameter - 0.4) <= 0.15 + 1e-12;
    return {ok, fmt("ER(50, 0.6) -> %.2f (unconverged fits %zu); WS(150, 0.4) -> %.2f (unconverged fits %zu)",
                    er.best_parameter, er.unconverged_fits, ws.best_parameter, ws.unconverged_fits)};
}

// ---- 6 ---------------------------------------------------------------------

Outcome planted_cluster_counts() {
    struct Case {
        std::vector<std::size_t> sizes;
        std::size_t inter;
        std::size_t probes;
    };
    std::vector<Case> cases{{{20, 25, 30, 35, 40, 35, 30, 25, 30}, 5, 5000}, {{}, 15, 2000}};
    for (int rep = 0; rep < 6; ++rep) {
        for (std::size_t s : {20u, 25u, 30u, 35u, 40u}) cases[1].sizes.push_back(s);
    }
    bool ok = true;
    std::ostringstream detail;
    for (const auto& c : cases) {
        const auto gen = generate(PlantedClusters{c.sizes, ErdosRenyi{0.5}, c.inter}, 0, 1);
        ProbeConfig probes;
        probes.probes = c.probes;
        probes.seed = 1;
        const auto cmp = compare_detectors(gen.graph, c.sizes.size(), 80, probes);
        const bool here = cmp.maxent.error && *cmp.maxent.error <= 2e-2;
        ok = ok && here;
        detail << "k=" << c.sizes.size() << " n=" << gen.graph.size() << ": maxent n_c="
               << fmt("%.3f", cmp.maxent.estimate.n_c) << " err="
               << (cmp.maxent.error ? fmt("%.2e", *cmp.maxent.error) : std::string("nogap")) << ", lanczos n_c="
               << fmt("%.3f", cmp.lanczos.estimate.n_c) << " err="
               << (cmp.lanczos.error ? fmt("%.2e", *cmp.lanczos.error) : std::string("nogap")) << "; ";
    }
    return {ok, detail.str()};
}

// ---- 7 ---------------------------------------------------------------------

Outcome component_counting() {
    std::mt19937_64 rng(77);
    std::size_t correct = 0;
    std::ostringstream misses;
    for (int trial = 0; trial < 20; ++trial) {
        PlantedClusters pc;
        const std::size_t k = 2 + rng() % 19;
        for (std::size_t i = 0; i < k; ++i) pc.sizes.push_back(10 + rng() % 51);
        pc.intra = ErdosRenyi{0.3 + 0.5 * std::uniform_real_distribution<double>(0.0, 1.0)(rng)};
        const auto gen = generate(pc, 0, 500 + trial);
        const auto truth = connected_components(gen.graph);
        ProbeConfig probes;
        probes.probes = 2000;
        probes.seed = 900 + trial;
        const auto density = fit_maxent(estimate_moments(normalized_laplacian(gen.graph), 40, probes));
        const auto est = estimate_clusters(density, gen.graph.size());
        if (est.gap_found && est.n_c_rounded == static_cast<long long>(truth)) {
            ++correct;
        } else {
            misses << " [n=" << gen.graph.size() << " truth=" << truth << " n_c=" << fmt("%.3f", est.n_c) << "]";
        }
    }
    return {correct == 20, fmt("%zu/20 configurations counted exactly", correct) + misses.str()};
}

// ---- 8 ---------------------------------------------------------------------

Outcome lanczos_exactness() {
    std::vector<SparseGraph> graphs;
    for (std::uint64_t s = 0; s < 4; ++s) graphs.push_back(generate(ErdosRenyi{0.15 + 0.1 * s}, 30 + 5 * s, s).graph);
    for (std::uint64_t s = 0; s < 3; ++s) graphs.push_back(generate(BarabasiAlbert{1 + s}, 40 + 5 * s, s).graph);
    for (std::uint64_t s = 0; s < 3; ++s) graphs.push_back(generate(WattsStrogatz{4, 0.2 + 0.2 * s}, 35 + 5 * s, s).graph);
    double eig_err = 0.0, moment_err = 0.0, missed_mass = 0.0;
    std::mt19937_64 rng(8);
    std::normal_distribution<double> z;
    for (const auto& g : graphs) {
        const std::size_t n = g.size();
        const auto x = oracle::scaled_laplacian(g);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
        std::vector<double> v(n);
        for (auto& e : v) e = z(rng);
        const Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(n)).normalized();
        const auto q = lanczos_quadrature(normalized_laplacian(g), n, v);
        for (double node : q.nodes) {
            double d = 1.0;
            for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) d = std::min(d, std::abs(es.eigenvalues()(j) - node));
            eig_err = std::max(eig_err, d);
        }
        for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
            double d = 1.0;
            for (double node : q.nodes) d = std::min(d, std::abs(es.eigenvalues()(j) - node));
            if (d > 1e-8) missed_mass += std::pow(es.eigenvectors().col(j).dot(u), 2);
        }
        Eigen::VectorXd w = u;
        for (std::size_t k = 0; k <= n; ++k) {
            double quad = 0.0;
            for (std::size_t i = 0; i < q.nodes.size(); ++i) quad += q.weights[i] * std::pow(q.nodes[i], static_cast<int>(k));
            moment_err = std::max(moment_err, std::abs(quad - u.dot(w)));
            w = x * w;
        }
    }
    return {eig_err < 1e-8 && moment_err < 1e-8 && missed_mass < 1e-12,
            fmt("10 graphs; max Ritz-to-eigenvalue distance %.2e; max moment error %.2e; unresolved eigen-mass %.2e",
                eig_err, moment_err, missed_mass)};
}

// ---- 9 ---------------------------------------------------------------------

Outcome trace_accuracy() {
    const auto g = generate(ErdosRenyi{0.05}, 500, 12).graph;
    const auto op = normalized_laplacian(g);
    const auto exact = exact_moments(op, 30, Basis::power);
    std::vector<std::vector<double>> samples(31);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        ProbeConfig cfg;
        cfg.seed = 1000 + seed;
        const auto mv = estimate_moments(op, 30, cfg, Basis::power);
        for (std::size_t k = 0; k <= 30; ++k) samples[k].push_back(mv.values[k]);
    }
    double worst = 0.0;
    for (std::size_t k = 1; k <= 30; ++k) {
        const auto& s = samples[k];
        const double mean = std::accumulate(s.begin(), s.end(), 0.0) / s.size();
        double var = 0.0;
        for (double v : s) var += (v - mean) * (v - mean);
        const double se = std::sqrt(var / (s.size() - 1)) / std::sqrt(static_cast<double>(s.size()));
        worst = std::max(worst, std::abs(mean - exact.values[k]) / se);
    }
    return {worst < 3.0, fmt("max |mean - exact| / SE over k<=30: %.2f", worst)};
}

// ---- 10 --------------------------------------------------------------------

struct Separation {
    double max_intra = 0.0;
    double min_inter = 0.0;
    std::size_t violations = 0;
};

Separation separation(const std::vector<SparseGraph>& graphs, std::size_t m, std::uint64_t seed) {
    EslConfig cfg;
    cfg.m = m;
    cfg.probes.seed = seed;
    const auto sm = similarity_matrix(graphs, {}, cfg);
    Separation s;
    s.min_inter = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = i + 1; j < 6; ++j) {
            if (i / 2 == j / 2) {
                s.max_intra = std::max(s.max_intra, sm.values[i][j]);
            } else {
                s.min_inter = std::min(s.min_inter, sm.values[i][j]);
                for (std::size_t a = 0; a < 6; a += 2) {
                    if (sm.values[a][a + 1] >= sm.values[i][j]) ++s.violations;
                }
            }
        }
    }
    return s;
}

constexpr std::uint64_t separation_family = 1;

Outcome similarity_separation() {
    const std::uint64_t base = separation_family * 1000;
    std::vector<SparseGraph> graphs;
    for (std::uint64_t s = 0; s < 2; ++s) graphs.push_back(generate(ErdosRenyi{0.012}, 500, base + 11 + s).graph);
    for (std::uint64_t s = 0; s < 2; ++s) graphs.push_back(generate(BarabasiAlbert{3}, 500, base + 21 + s).graph);
    for (std::uint64_t s = 0; s < 2; ++s) graphs.push_back(generate(WattsStrogatz{6, 0.2}, 500, base + 31 + s).graph);
    const std::uint64_t probe_seed = 5 + separation_family;
    const auto full = separation(graphs, 30, probe_seed);
    const auto gaussian = separation(graphs, 2, probe_seed);
    return {full.violations == 0 && gaussian.violations > 0,
            fmt("m=30: max intra %.3e < min inter %.3e (violations %zu); three-multiplier rerun: violations %zu",
                full.max_intra, full.min_inter, full.violations, gaussian.violations)};
}

} // namespace

int main(int argc, char** argv) {
    struct Criterion {
        const char* name;
        double budget_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"semicircle fit", 30, semicircle_fit},
        {"kernel-smoothing bias", 10, smoothing_bias},
        {"moment matching", 120, moment_matching},
        {"analytic divergences", 60, analytic_formulas},
        {"parameter inference", 600, parameter_inference},
        {"planted cluster counts", 600, planted_cluster_counts},
        {"exact component counting", 300, component_counting},
        {"Lanczos exactness", 60, lanczos_exactness},
        {"stochastic trace accuracy", 300, trace_accuracy},
        {"similarity separation", 600, similarity_separation},
    };

    std::vector<std::size_t> selected;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            const int c = std::atoi(argv[++i]);
            if (c < 1 || c > static_cast<int>(criteria.size())) {
                std::fprintf(stderr, "unknown criterion %d\n", c);
                return 2;
            }
            selected.push_back(static_cast<std::size_t>(c));
        } else {
            std::fprintf(stderr, "usage: acceptance [--criterion N]...\n");
            return 2;
        }
    }
    if (selected.empty()) {
        for (std::size_t c = 1; c <= criteria.size(); ++c) selected.push_back(c);
    }

    bool all = true;
    for (std::size_t c : selected) {
        const auto& crit = criteria[c - 1];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = crit.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < crit.budget_seconds;
        const bool pass = o.pass && in_time;
        all = all && pass;
        std::printf("criterion %zu (%s): %s  %s  [%.1f s of %.0f s]\n", c, crit.name, pass ? "PASS" : "FAIL",
                    o.detail.c_str(), secs, crit.budget_seconds);
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
