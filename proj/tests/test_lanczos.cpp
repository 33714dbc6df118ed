#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "spectral/generators.hpp"
#include "spectral/kernel_smoothing.hpp"
#include "spectral/lanczos.hpp"

using namespace spectral;

namespace {

std::vector<double> gaussian_vector(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::vector<double> v(n);
    for (auto& x : v) x = z(rng);
    return v;
}

/// v^T X^k v / v^T v for k = 0..kmax by repeated dense products.
std::vector<double> quadratic_forms(const Eigen::MatrixXd& x, const std::vector<double>& v, std::size_t kmax) {
    Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    const Eigen::VectorXd u0 = u;
    const double norm2 = u0.squaredNorm();
    std::vector<double> out;
    for (std::size_t k = 0; k <= kmax; ++k) {
        out.push_back(u0.dot(u) / norm2);
        u = x * u;
    }
    return out;
}

double quadrature_moment(const LanczosQuadrature& q, std::size_t k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) acc += q.weights[i] * std::pow(q.nodes[i], static_cast<int>(k));
    return acc;
}

DiracSpectrum random_spectrum(std::mt19937_64& rng, double lo = 0.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    DiracSpectrum ds;
    const std::size_t atoms = 1 + rng() % 30;
    double total = 0.0;
    for (std::size_t i = 0; i < atoms; ++i) {
        ds.nodes.push_back(lo + (1.0 - lo) * u(rng));
        ds.weights.push_back(0.05 + u(rng));
        total += ds.weights.back();
    }
    for (auto& w : ds.weights) w /= total;
    return ds;
}

}  // namespace

TEST(LanczosQuadrature, SingleEdgeFullOrder) {
    const std::vector<WeightedEdge> edges{{0, 1, 1.0}};
    SparseGraph g = SparseGraph::from_edges(2, edges);
    auto op = normalized_laplacian(g);
    std::vector<double> start{1.0, 0.0};
    auto q = lanczos_quadrature(op, 2, start);
    ASSERT_EQ(q.nodes.size(), 2u);
    EXPECT_NEAR(q.nodes[0], 0.0, 1e-14);
    EXPECT_NEAR(q.nodes[1], 1.0, 1e-14);
    EXPECT_NEAR(q.weights[0], 0.5, 1e-14);
    EXPECT_NEAR(q.weights[1], 0.5, 1e-14);
}

TEST(LanczosQuadrature, DisjointCliquesGiveTwoNodes) {
    auto g = generate(PlantedClusters{{4, 4, 4}, CompleteGraph{}, 0}, 0, 1).graph;
    auto op = normalized_laplacian(g);
    auto start = gaussian_vector(12, 5);
    auto q = lanczos_quadrature(op, 6, start);
    EXPECT_TRUE(q.breakdown);
    ASSERT_EQ(q.nodes.size(), 2u);
    EXPECT_NEAR(q.nodes[0], 0.0, 1e-8);
    EXPECT_NEAR(q.nodes[1], 2.0 / 3.0, 1e-8);
    EXPECT_NEAR(q.weights[0] + q.weights[1], 1.0, 1e-12);
    // Weight at zero is the share of the start vector in the block-constant subspace.
    double inside = 0.0, total = 0.0;
    for (int b = 0; b < 3; ++b) {
        double s = 0.0;
        for (int i = 0; i < 4; ++i) s += start[4 * b + i];
        inside += s * s / 4.0;
    }
    for (double x : start) total += x * x;
    EXPECT_NEAR(q.weights[0], inside / total, 1e-10);
}

TEST(LanczosQuadrature, ReproducesQuadraticFormMoments) {
    std::vector<SparseGraph> graphs{generate(ErdosRenyi{0.1}, 120, 3).graph, generate(BarabasiAlbert{2}, 150, 4).graph,
                                    generate(WattsStrogatz{4, 0.2}, 100, 5).graph};
    for (const auto& g : graphs) {
        auto op = normalized_laplacian(g);
        const auto x = oracle::scaled_laplacian(g);
        for (std::size_t m : {3u, 8u, 15u}) {
            auto start = gaussian_vector(g.size(), 40 + m);
            auto q = lanczos_quadrature(op, m, start);
            ASSERT_FALSE(q.breakdown);
            const auto forms = quadratic_forms(x, start, 2 * m - 1);
            for (std::size_t k = 0; k <= 2 * m - 1; ++k) EXPECT_NEAR(quadrature_moment(q, k), forms[k], 1e-8) << k;
        }
    }
}

TEST(LanczosQuadrature, FullDimensionRecoversSpectralMeasure) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto g = generate(ErdosRenyi{0.2}, 40, 70 + seed).graph;
        auto op = normalized_laplacian(g);
        const auto x = oracle::scaled_laplacian(g);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
        auto start = gaussian_vector(40, seed);
        const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(start.data(), 40).normalized();
        auto q = lanczos_quadrature(op, 40, start);
        for (std::size_t i = 0; i < q.nodes.size(); ++i) {
            double dist = 1.0, projected = 0.0;
            for (Eigen::Index j = 0; j < 40; ++j) {
                const double lam = es.eigenvalues()(j);
                dist = std::min(dist, std::abs(lam - q.nodes[i]));
                if (std::abs(lam - q.nodes[i]) < 1e-7) projected += std::pow(es.eigenvectors().col(j).dot(v), 2);
            }
            EXPECT_LT(dist, 1e-8);
            EXPECT_NEAR(q.weights[i], projected, 1e-8);
        }
    }
}

TEST(LanczosQuadrature, Validation) {
    auto g = generate(ErdosRenyi{0.3}, 10, 1).graph;
    auto op = normalized_laplacian(g);
    std::vector<double> start(10, 1.0), zero(10, 0.0), wrong(9, 1.0);
    EXPECT_THROW(lanczos_quadrature(op, 0, start), std::invalid_argument);
    EXPECT_THROW(lanczos_quadrature(op, 11, start), std::invalid_argument);
    EXPECT_THROW(lanczos_quadrature(op, 3, zero), std::invalid_argument);
    EXPECT_THROW(lanczos_quadrature(op, 3, wrong), std::invalid_argument);
}

TEST(LanczosSpectrum, PoolsProbeQuadratures) {
    auto g = generate(BarabasiAlbert{3}, 200, 9).graph;
    auto op = normalized_laplacian(g);
    const auto x = oracle::scaled_laplacian(g);
    ProbeConfig cfg;
    cfg.probes = 12;
    cfg.seed = 21;
    const std::size_t m = 10;
    auto ds = lanczos_spectrum(op, m, cfg);
    EXPECT_EQ(ds.steps, m);
    EXPECT_EQ(ds.starts, 12u);
    EXPECT_EQ(ds.size(), m * 12);
    EXPECT_TRUE(std::is_sorted(ds.nodes.begin(), ds.nodes.end()));
    EXPECT_NEAR(std::accumulate(ds.weights.begin(), ds.weights.end(), 0.0), 1.0, 1e-12);
    for (double v : ds.nodes) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
    std::vector<double> expected(2 * m, 0.0), probe(200);
    for (std::size_t j = 0; j < cfg.probes; ++j) {
        make_probe(cfg, j, probe);
        auto forms = quadratic_forms(x, probe, 2 * m - 1);
        for (std::size_t k = 0; k < 2 * m; ++k) expected[k] += forms[k] / cfg.probes;
    }
    for (std::size_t k = 0; k < 2 * m; ++k) EXPECT_NEAR(ds.moment(k), expected[k], 1e-8) << k;
}

TEST(LanczosSpectrum, CountsBreakdowns) {
    auto g = generate(PlantedClusters{{5, 5}, CompleteGraph{}, 0}, 0, 1).graph;
    ProbeConfig cfg;
    cfg.probes = 4;
    auto ds = lanczos_spectrum(normalized_laplacian(g), 5, cfg);
    EXPECT_EQ(ds.breakdowns, 4u);
    EXPECT_EQ(ds.size(), 8u);
    EXPECT_NEAR(ds.moment(1), ds.moment(1, Basis::power), 0.0);
    EXPECT_NEAR(ds.moment(0, Basis::chebyshev), 1.0, 1e-12);
}

TEST(KernelSmoothing, SingleInteriorAtom) {
    DiracSpectrum ds{{0.5}, {1.0}};
    auto s = kernel_smooth(ds, 0.01);
    EXPECT_NEAR(s(0.5), 1.0 / (std::sqrt(2.0 * std::numbers::pi) * 0.01), 1e-3);
    EXPECT_NEAR(s.inside_mass, 1.0, 1e-9);
    EXPECT_NEAR(s.grid().integrate(s.values), 1.0, 1e-12);
    EXPECT_NEAR(s(0.53) / s(0.5), std::exp(-4.5), 1e-4);
}

TEST(KernelSmoothing, EdgeAtomIsRenormalized) {
    DiracSpectrum ds{{0.0, 1.0}, {0.25, 0.75}};
    auto s = kernel_smooth(ds, 1e-3);
    EXPECT_NEAR(s.inside_mass, 0.5, 0.03);
    EXPECT_NEAR(s.grid().integrate(s.values), 1.0, 1e-12);
    EXPECT_NEAR(s(0.5), 0.0, 1e-300);
}

TEST(KernelSmoothing, DensityIsNonNegativeAndNormalized) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        auto ds = random_spectrum(rng);
        for (double sigma : {1e-3, 1e-2}) {
            auto s = kernel_smooth(ds, sigma);
            for (double v : s.values) EXPECT_GE(v, 0.0);
            EXPECT_NEAR(s.grid().integrate(s.values), 1.0, 1e-10);
        }
    }
}

TEST(KernelSmoothing, Validation) {
    DiracSpectrum ds{{0.5}, {1.0}};
    EXPECT_THROW(kernel_smooth(ds, 0.0), std::invalid_argument);
    DiracSpectrum bad{{0.5, 0.6}, {1.0}};
    EXPECT_THROW(kernel_smooth(bad, 1e-3), std::invalid_argument);
    auto s = kernel_smooth(ds, 1e-3);
    EXPECT_THROW(s(1.5), std::invalid_argument);
    EXPECT_THROW(smoothed_moment_bias(ds, 1e-3, 0), std::invalid_argument);
    EXPECT_THROW(smoothed_moment_bias(ds, -1.0, 2), std::invalid_argument);
}

TEST(SmoothingBias, LowOrderClosedForms) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        auto ds = random_spectrum(rng);
        const double sigma = 0.01 * (trial + 1);
        auto b1 = smoothed_moment_bias(ds, sigma, 1);
        EXPECT_NEAR(b1.analytic_bias, 0.0, 0.0);
        EXPECT_NEAR(b1.smoothed - b1.raw, 0.0, 1e-14);
        auto b2 = smoothed_moment_bias(ds, sigma, 2);
        EXPECT_NEAR(b2.analytic_bias, sigma * sigma, 1e-15);
        EXPECT_NEAR(b2.smoothed - b2.raw, sigma * sigma, 1e-12);
        double expected4 = 0.0;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const double x = ds.nodes[i];
            expected4 += ds.weights[i] * (6.0 * sigma * sigma * x * x + 3.0 * std::pow(sigma, 4));
        }
        auto b4 = smoothed_moment_bias(ds, sigma, 4);
        EXPECT_NEAR(b4.analytic_bias, expected4, 1e-14);
        EXPECT_NEAR(b4.smoothed - b4.raw, expected4, 1e-12);
    }
}

TEST(SmoothingBias, ClosedFormMatchesGaussianMixture) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        auto ds = random_spectrum(rng);
        for (std::size_t k = 1; k <= 12; ++k) {
            auto b = smoothed_moment_bias(ds, 0.02, k);
            const double mixture = oracle::integrate(
                [&](double x) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < ds.size(); ++i) {
                        const double z = (x - ds.nodes[i]) / 0.02;
                        acc += ds.weights[i] * std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * 0.02);
                    }
                    return acc * std::pow(x, static_cast<int>(k));
                },
                -0.5, 1.5, 256);
            EXPECT_NEAR(b.smoothed, mixture, 1e-10) << k;
            EXPECT_NEAR(b.smoothed - b.raw, b.analytic_bias, 1e-12) << k;
        }
    }
}

TEST(SmoothingBias, PositiveAndRelativelyGrowing) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        auto ds = random_spectrum(rng);
        for (std::size_t k = 2; k <= 10; ++k) EXPECT_GT(smoothed_moment_bias(ds, 1e-2, k).analytic_bias, 0.0);
    }
    for (double x : {0.05, 0.3, 0.9}) {
        DiracSpectrum ds{{x}, {1.0}};
        double previous = 0.0;
        for (std::size_t k = 2; k <= 12; ++k) {
            auto b = smoothed_moment_bias(ds, 1e-2, k);
            const double relative = b.analytic_bias / b.raw;
            EXPECT_GT(relative, previous) << "x=" << x << " k=" << k;
            previous = relative;
        }
    }
}
