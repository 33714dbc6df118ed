#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spectral/basis.hpp"
#include "spectral/dense.hpp"
#include "spectral/laplacian.hpp"

namespace spectral {

/// Spectral moments mu_0..mu_m of a density on [0,1], tagged with their basis.
struct MomentVector {
    Basis basis = Basis::power;
    std::vector<double> values;  // values[0] == 1
    std::size_t probes = 0;      // d; 0 for exact or analytic moments
    std::size_t dimension = 0;   // n; 0 when not tied to a matrix

    std::size_t order() const { return values.empty() ? 0 : values.size() - 1; }
    double operator[](std::size_t k) const { return values[k]; }
};

enum class ProbeDistribution { gaussian, rademacher };

inline std::string_view to_string(ProbeDistribution d) {
    return d == ProbeDistribution::gaussian ? "gaussian" : "rademacher";
}

inline ProbeDistribution parse_probe_distribution(std::string_view s) {
    if (s == "gaussian") return ProbeDistribution::gaussian;
    if (s == "rademacher") return ProbeDistribution::rademacher;
    throw std::invalid_argument("unknown probe distribution '" + std::string(s) + "'");
}

struct ProbeConfig {
    std::size_t probes = 100;
    ProbeDistribution distribution = ProbeDistribution::gaussian;
    std::uint64_t seed = 0;
};

/// Fills `out` with probe vector number `index`. Each probe has its own
/// generator, so a probe's entries depend only on (seed, index).
inline void make_probe(const ProbeConfig& cfg, std::size_t index, std::span<double> out) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 rng(seq);
    if (cfg.distribution == ProbeDistribution::gaussian) {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (auto& v : out) v = normal(rng);
    } else {
        for (auto& v : out) v = (rng() & 1u) ? 1.0 : -1.0;
    }
}

/// Per-probe quadratic forms rho_k = v^T phi_k(X) v for k = 0..m, all orders
/// from a single sweep of m matvecs.
template <SymmetricOperator Op>
void probe_quadratic_forms(const Op& op, std::span<const double> v, Basis basis, std::span<double> rho) {
    const std::size_t n = op.size();
    const std::size_t m = rho.size() - 1;
    auto dot = [n](std::span<const double> a, std::span<const double> b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
        return acc;
    };
    rho[0] = dot(v, v);
    if (m == 0) return;
    std::vector<double> prev(v.begin(), v.end()), cur(n), next(n);
    if (basis == Basis::power) {
        for (std::size_t k = 1; k <= m; ++k) {
            op.apply(prev, cur);
            rho[k] = dot(v, cur);
            std::swap(prev, cur);
        }
        return;
    }
    // Chebyshev recurrence on Y = 2X - I, whose spectrum lies in [-1, 1].
    op.apply(prev, cur);
    for (std::size_t i = 0; i < n; ++i) cur[i] = 2.0 * cur[i] - prev[i];
    rho[1] = dot(v, cur);
    for (std::size_t k = 2; k <= m; ++k) {
        op.apply(cur, next);
        for (std::size_t i = 0; i < n; ++i) next[i] = 2.0 * (2.0 * next[i] - cur[i]) - prev[i];
        rho[k] = dot(v, next);
        std::swap(prev, cur);
        std::swap(cur, next);
    }
}

/// Stochastic trace estimate of mu_k = (1/n) tr phi_k(X) for k = 0..m.
///
/// The probe sums are normalized by sum_j v_j^T v_j rather than by d*n, so
/// the result is the moment sequence of an actual probability measure on the
/// spectrum and mu_0 = 1 exactly.
template <SymmetricOperator Op>
MomentVector estimate_moments(const Op& op, std::size_t m, const ProbeConfig& cfg, Basis basis = Basis::chebyshev) {
    if (m < 1) throw std::invalid_argument("estimate_moments: order must be at least 1");
    if (cfg.probes < 1) throw std::invalid_argument("estimate_moments: need at least one probe");
    const std::size_t n = op.size();
    if (n == 0) throw std::invalid_argument("estimate_moments: empty operator");
    std::vector<double> sums(m + 1, 0.0), rho(m + 1), v(n);
    for (std::size_t j = 0; j < cfg.probes; ++j) {
        make_probe(cfg, j, v);
        probe_quadratic_forms(op, v, basis, rho);
        for (std::size_t k = 0; k <= m; ++k) sums[k] += rho[k];
    }
    MomentVector out{basis, std::vector<double>(m + 1), cfg.probes, n};
    out.values[0] = 1.0;
    for (std::size_t k = 1; k <= m; ++k) out.values[k] = sums[k] / sums[0];
    return out;
}

/// Moments of the weighted point-mass measure sum_i w_i delta(x - x_i).
/// Without weights every atom gets 1/size.
inline MomentVector dirac_moments(std::span<const double> atoms, std::size_t m, Basis basis,
                                  std::span<const double> weights = {}) {
    if (!weights.empty() && weights.size() != atoms.size()) throw std::invalid_argument("dirac_moments: size mismatch");
    MomentVector out{basis, std::vector<double>(m + 1, 0.0), 0, atoms.size()};
    std::vector<double> phi(m + 1);
    const double uniform = atoms.empty() ? 0.0 : 1.0 / static_cast<double>(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        basis_values(basis, atoms[i], phi);
        const double w = weights.empty() ? uniform : weights[i];
        for (std::size_t k = 0; k <= m; ++k) out.values[k] += w * phi[k];
    }
    return out;
}

/// Exact moments from a dense eigendecomposition (n <= dense_size_limit).
template <SymmetricOperator Op>
MomentVector exact_moments(const Op& op, std::size_t m, Basis basis = Basis::power) {
    if (op.size() > dense_size_limit) throw DenseLimitError(op.size());
    auto eig = operator_eigenvalues(op);
    for (auto& x : eig) x = std::clamp(x, 0.0, 1.0);
    auto out = dirac_moments(eig, m, basis);
    out.values[0] = 1.0;
    return out;
}

/// Moments of the semicircle law on [center - radius, center + radius].
///
/// Power moments follow from the centred even moments (R/2)^{2j} C_j
/// (Catalan numbers) by binomial expansion about the centre. Chebyshev
/// moments are computed directly with Gauss-Chebyshev quadrature of the
/// second kind, which is exact for polynomials of degree <= 2N - 1.
inline MomentVector semicircle_moments(double center, double radius, std::size_t m, Basis basis = Basis::power) {
    if (!(radius > 0.0) || center - radius < -1e-15 || center + radius > 1.0 + 1e-15) {
        throw std::invalid_argument("semicircle_moments: support must lie inside [0, 1]");
    }
    MomentVector out{basis, std::vector<double>(m + 1, 0.0), 0, 0};
    if (basis == Basis::power) {
        // central[j] = E[(x - center)^j]
        std::vector<double> central(m + 1, 0.0);
        double catalan = 1.0, half_r2 = 1.0;
        for (std::size_t j = 0; 2 * j <= m; ++j) {
            central[2 * j] = half_r2 * catalan;
            catalan = catalan * 2.0 * static_cast<double>(2 * j + 1) / static_cast<double>(j + 2);
            half_r2 *= (radius / 2.0) * (radius / 2.0);
        }
        for (std::size_t k = 0; k <= m; ++k) {
            double binom = 1.0, acc = 0.0;
            for (std::size_t j = 0; j <= k; ++j) {
                acc += binom * central[j] * std::pow(center, static_cast<double>(k - j));
                binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
            }
            out.values[k] = acc;
        }
    } else {
        const std::size_t nodes = m + 2;
        std::vector<double> phi(m + 1);
        const double pi = std::acos(-1.0);
        for (std::size_t i = 1; i <= nodes; ++i) {
            const double theta = static_cast<double>(i) * pi / static_cast<double>(nodes + 1);
            const double s = std::sin(theta);
            const double w = 2.0 / static_cast<double>(nodes + 1) * s * s;
            basis_values(basis, center + radius * std::cos(theta), phi);
            for (std::size_t k = 0; k <= m; ++k) out.values[k] += w * phi[k];
        }
    }
    out.values[0] = 1.0;
    return out;
}

inline MomentVector convert_basis(const MomentVector& mv, Basis target) {
    MomentVector out = mv;
    out.basis = target;
    out.values = convert_moment_values(mv.values, mv.basis, target);
    return out;
}

} // namespace spectral
