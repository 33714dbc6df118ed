#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace spectral {

/// Polynomial family used for moments and for the MaxEnt exponent on [0,1].
///   power:     phi_k(x) = x^k
///   chebyshev: phi_k(x) = T_k(2x - 1)
enum class Basis { power, chebyshev };

inline std::string_view to_string(Basis b) { return b == Basis::power ? "power" : "chebyshev"; }

inline Basis parse_basis(std::string_view s) {
    if (s == "power") return Basis::power;
    if (s == "chebyshev") return Basis::chebyshev;
    throw std::invalid_argument("unknown basis '" + std::string(s) + "' (expected power|chebyshev)");
}

/// phi_0(x) .. phi_{out.size()-1}(x).
inline void basis_values(Basis basis, double x, std::span<double> out) {
    if (out.empty()) return;
    out[0] = 1.0;
    if (out.size() == 1) return;
    if (basis == Basis::power) {
        for (std::size_t k = 1; k < out.size(); ++k) out[k] = out[k - 1] * x;
        return;
    }
    const double t = 2.0 * x - 1.0;
    out[1] = t;
    for (std::size_t k = 2; k < out.size(); ++k) out[k] = 2.0 * t * out[k - 1] - out[k - 2];
}

/// Values with first and second derivatives in x, by differentiating the
/// three-term recurrence (no endpoint singularities).
inline void basis_derivatives(Basis basis, double x, std::span<double> value, std::span<double> d1,
                              std::span<double> d2) {
    const std::size_t n = value.size();
    if (d1.size() != n || d2.size() != n) throw std::invalid_argument("basis_derivatives: size mismatch");
    if (n == 0) return;
    value[0] = 1.0;
    d1[0] = 0.0;
    d2[0] = 0.0;
    if (n == 1) return;
    if (basis == Basis::power) {
        for (std::size_t k = 1; k < n; ++k) {
            value[k] = value[k - 1] * x;
            d1[k] = static_cast<double>(k) * value[k - 1];
            d2[k] = k >= 2 ? static_cast<double>(k * (k - 1)) * value[k - 2] : 0.0;
        }
        return;
    }
    // In t = 2x - 1: T_{k+1} = 2t T_k - T_{k-1},
    // T'_{k+1} = 2 T_k + 2t T'_k - T'_{k-1}, T''_{k+1} = 4 T'_k + 2t T''_k - T''_{k-1}.
    const double t = 2.0 * x - 1.0;
    value[1] = t;
    d1[1] = 1.0;
    d2[1] = 0.0;
    for (std::size_t k = 2; k < n; ++k) {
        value[k] = 2.0 * t * value[k - 1] - value[k - 2];
        d1[k] = 2.0 * value[k - 1] + 2.0 * t * d1[k - 1] - d1[k - 2];
        d2[k] = 4.0 * d1[k - 1] + 2.0 * t * d2[k - 1] - d2[k - 2];
    }
    // Chain rule for dt/dx = 2.
    for (std::size_t k = 0; k < n; ++k) {
        d1[k] *= 2.0;
        d2[k] *= 4.0;
    }
}

namespace detail {

using quad = boost::multiprecision::cpp_bin_float_quad;

/// Row k holds the power-series coefficients of T_k(2x - 1). All entries are
/// integers and exact in quad precision for the orders used here.
inline std::vector<std::vector<quad>> shifted_chebyshev_coefficients(std::size_t m) {
    std::vector<std::vector<quad>> c(m + 1, std::vector<quad>(m + 1, quad(0)));
    c[0][0] = 1;
    if (m >= 1) {
        c[1][0] = -1;
        c[1][1] = 2;
    }
    for (std::size_t k = 2; k <= m; ++k) {
        // T_k = 2(2x - 1) T_{k-1} - T_{k-2}
        for (std::size_t j = 0; j <= k; ++j) {
            quad v = -2 * c[k - 1][j] - c[k - 2][j];
            if (j >= 1) v += 4 * c[k - 1][j - 1];
            c[k][j] = v;
        }
    }
    return c;
}

/// Row k holds x^k expanded in T_j(2x - 1):
/// x^k = 2^{-2k} [C(2k,k) + 2 sum_{j>=1} C(2k,k-j) T_j(2x-1)].
inline std::vector<std::vector<quad>> power_in_chebyshev(std::size_t m) {
    std::vector<std::vector<quad>> p(m + 1, std::vector<quad>(m + 1, quad(0)));
    for (std::size_t k = 0; k <= m; ++k) {
        // binomial C(2k, i) for i = 0..k, built incrementally
        std::vector<quad> binom(k + 1);
        binom[0] = 1;
        for (std::size_t i = 1; i <= k; ++i) binom[i] = binom[i - 1] * quad(2 * k - i + 1) / quad(i);
        const quad scale = boost::multiprecision::ldexp(quad(1), -2 * static_cast<int>(k));
        p[k][0] = binom[k] * scale;
        for (std::size_t j = 1; j <= k; ++j) p[k][j] = 2 * binom[k - j] * scale;
    }
    return p;
}

} // namespace detail

/// Exact linear change between power moments E[x^k] and shifted-Chebyshev
/// moments E[T_k(2x-1)] on [0,1]. Arithmetic runs in quad precision because
/// the power-to-Chebyshev map amplifies rounding by roughly 5.8^m.
inline std::vector<double> convert_moment_values(std::span<const double> values, Basis from, Basis to) {
    if (from == to) return {values.begin(), values.end()};
    if (values.empty()) return {};
    const std::size_t m = values.size() - 1;
    const auto coeffs = from == Basis::power ? detail::shifted_chebyshev_coefficients(m) : detail::power_in_chebyshev(m);
    std::vector<double> out(m + 1);
    for (std::size_t k = 0; k <= m; ++k) {
        detail::quad acc = 0;
        for (std::size_t j = 0; j <= k; ++j) acc += coeffs[k][j] * detail::quad(values[j]);
        out[k] = static_cast<double>(acc);
    }
    return out;
}

} // namespace spectral
