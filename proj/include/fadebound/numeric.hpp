// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

namespace fadebound {

/// Gaussian tail probability Q(x) = Pr[N(0,1) > x].
inline double q_function(double x) {
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1]. Nodes by Newton iteration on
/// P_n from the Chebyshev-like initial guess, weights 2/((1-x^2) P_n'(x)^2).
inline QuadratureRule gauss_legendre(std::size_t n) {
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        long double x = std::cos(std::numbers::pi_v<long double> *
                                 (static_cast<long double>(i) + 0.75L) /
                                 (static_cast<long double>(n) + 0.5L));
        long double dp = 0.0L;
        for (int iter = 0; iter < 100; ++iter) {
            long double p0 = 1.0L;
            long double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const long double p2 =
                    ((2.0L * k - 1.0L) * x * p1 - (k - 1.0L) * p0) / static_cast<long double>(k);
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<long double>(n) * (x * p1 - p0) / (x * x - 1.0L);
            const long double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-19L) {
                break;
            }
        }
        const double w = static_cast<double>(2.0L / ((1.0L - x * x) * dp * dp));
        rule.nodes[i] = -static_cast<double>(x);
        rule.nodes[n - 1 - i] = static_cast<double>(x);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

/// Nodes for (1/pi) * integral over theta in [0, pi/2] of the Craig-form
/// integrand. Gauss-Legendre in u on [0, 1] with theta = (pi/2) u^2, which
/// clusters nodes near theta = 0 where the integrand turns over when
/// d^2 E lambda is small. The 1/pi prefactor and the Jacobian are folded
/// into `weight`.
struct CraigNode {
    double sin2;    // sin^2(theta)
    double weight;  // (1/pi) * jacobian * GL weight
};

inline constexpr std::size_t craig_node_count = 64;

inline const std::array<CraigNode, craig_node_count>& craig_nodes() {
    static const std::array<CraigNode, craig_node_count> table = [] {
        std::array<CraigNode, craig_node_count> out{};
        const QuadratureRule gl = gauss_legendre(craig_node_count);
        for (std::size_t i = 0; i < craig_node_count; ++i) {
            const double u = 0.5 * (gl.nodes[i] + 1.0);
            const double theta = 0.5 * std::numbers::pi * u * u;
            const double s = std::sin(theta);
            // d(theta)/du = pi u; GL on [0,1] carries a factor 1/2
            out[i] = {s * s, 0.5 * gl.weights[i] * u};
        }
        return out;
    }();
    return table;
}

/// 95% Wilson score interval for `successes` out of `trials`.
inline std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials,
                                                 double z = 1.959963984540054) {
    if (trials == 0) {
        return {0.0, 1.0};
    }
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    double lo = centre - half;
    double hi = centre + half;
    // Keep the point estimate inside the interval despite rounding.
    if (lo > p) lo = p;
    if (hi < p) hi = p;
    return {lo < 0.0 ? 0.0 : lo, hi > 1.0 ? 1.0 : hi};
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace fadebound
