// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "fadebound/channel.hpp"
#include "fadebound/constellation.hpp"
#include "fadebound/error.hpp"
#include "fadebound/numeric.hpp"

namespace fadebound {

/// Signal-to-noise ratio E / sigma^2 with sigma^2 = 1.
struct LinkParams {
    double snr;

    explicit LinkParams(double snr_linear) : snr(snr_linear) {
        if (!(snr > 0.0) || !std::isfinite(snr)) {
            fail_input("snr must be positive and finite");
        }
    }
    static LinkParams from_db(double snr_db) { return LinkParams(db_to_linear(snr_db)); }
};

struct BoundPoint {
    double snr_db = 0.0;
    double union_bound = 0.0;
    double new_bound = 0.0;
    double gamma_star = 0.0;
};

/// The spectrum pooled over transmitted signals: every bound below only
/// needs (1/M) sum_i sum_d A_i(d) g(d), so per-signal lists are merged into
/// one list of squared distances (ascending) with weights sum_i A_i(d) / M.
struct PairwiseTerms {
    std::vector<double> squared_distance;
    std::vector<double> weight;
    std::size_t signal_count = 0;

    PairwiseTerms() = default;
    PairwiseTerms(std::vector<double> d2, std::vector<double> w, std::size_t m)
        : squared_distance(std::move(d2)), weight(std::move(w)), signal_count(m) {
        finish();
    }

    /// Sum of weight[k..]; filled by finish().
    std::vector<double> weight_suffix;

    void finish() {
        weight_suffix.assign(weight.size() + 1, 0.0);
        for (std::size_t k = weight.size(); k-- > 0;) {
            weight_suffix[k] = weight_suffix[k + 1] + weight[k];
        }
    }

    std::size_t size() const noexcept { return weight.size(); }
    double total_weight() const {
        long double s = 0.0L;
        for (double w : weight) s += w;
        return static_cast<double>(s);
    }
};

inline PairwiseTerms pairwise_terms(const DistanceSpectrum& spec, double bin_tol = default_bin_tol) {
    PairwiseTerms out;
    out.signal_count = spec.signal_count();
    if (out.signal_count < 2) {
        fail_input("spectrum needs at least two signals");
    }
    if (spec.symmetric()) {
        for (const auto& e : spec.for_signal(0)) {
            out.squared_distance.push_back(e.distance * e.distance);
            out.weight.push_back(static_cast<double>(e.count));
        }
        out.finish();
        return out;
    }
    struct Item {
        std::int64_t key;
        double d2;
        std::uint64_t count;
    };
    std::vector<Item> items;
    for (const auto& list : spec.lists()) {
        for (const auto& e : list) {
            const double d2 = e.distance * e.distance;
            items.push_back({distance_bin(d2, bin_tol), d2, e.count});
        }
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        return a.key != b.key ? a.key < b.key : a.d2 < b.d2;
    });
    const double inv_m = 1.0 / static_cast<double>(out.signal_count);
    for (std::size_t a = 0; a < items.size();) {
        std::size_t b = a;
        long double d2_sum = 0.0L;
        std::uint64_t n = 0;
        while (b < items.size() && items[b].key == items[a].key) {
            d2_sum += static_cast<long double>(items[b].d2) * items[b].count;
            n += items[b].count;
            ++b;
        }
        out.squared_distance.push_back(static_cast<double>(d2_sum / n));
        out.weight.push_back(static_cast<double>(n) * inv_m);
        a = b;
    }
    out.finish();
    return out;
}

namespace detail {

/// Coefficients w_i of the positive expansion
///   sum_j b_j e^{-gamma r_j} / (1 + t lambda_j) = sum_i w_i / prod_{l >= i} (q_l + t),
/// where q_0 >= q_1 >= ... are the rates 1/lambda_j in descending order.
/// The left side is (-1)^{N-1} prod_j r_j times the divided difference of
/// e^{-gamma u} / (u + t) over the rates; the Leibniz rule separates the two
/// factors, and writing e^{-gamma u} = e^{-gamma q_0} e^{gamma (q_0 - u)} gives
///   w_i = prod_j r_j e^{-gamma q_0} sum_m gamma^{m+i} / (m+i)! h_m(v_0..v_i),
/// v_l = q_0 - q_l >= 0, a sum of positive terms. Empty when gamma times
/// the rate spread is too large for the series; the caller then falls back
/// to the partial fractions, which no longer cancel in that regime.
inline std::vector<long double> tail_weights(const RayleighChannel& ch, double gamma) {
    const auto& lambda = ch.eigenvalues();
    const std::size_t n = lambda.size();
    std::vector<long double> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = 1.0L / lambda[n - 1 - i];
    const long double g = gamma;
    const long double spread = g * (q.front() - q.back());
    if (spread > 50.0L) return {};

    std::vector<long double> v(n), w(n, 0.0L), h(n, 0.0L);
    for (std::size_t i = 0; i < n; ++i) v[i] = q.front() - q[i];
    // coefficient gamma^k / k! for k = m + i, kept for the current m
    std::vector<long double> coef(n);
    coef[0] = 1.0L;
    for (std::size_t i = 1; i < n; ++i) coef[i] = coef[i - 1] * g / static_cast<long double>(i);
    for (std::size_t m = 0;; ++m) {
        if (m == 0) {
            std::fill(h.begin(), h.end(), 1.0L);
        } else {
            long double prev = 0.0L;
            for (std::size_t i = 0; i < n; ++i) {
                h[i] = prev + v[i] * h[i];
                prev = h[i];
            }
            for (std::size_t i = 0; i < n; ++i) coef[i] *= g / static_cast<long double>(m + i);
        }
        bool converged = static_cast<long double>(m) > 2.0L * spread;
        for (std::size_t i = 0; i < n; ++i) {
            const long double term = coef[i] * h[i];
            w[i] += term;
            converged = converged && term <= 1e-21L * w[i];
        }
        if (converged || m > 1000) break;
    }
    long double scale = std::exp(-g * q.front());
    for (std::size_t i = 0; i < n; ++i) scale *= q[i];
    for (long double& x : w) x *= scale;
    return w;
}

/// sum_terms w * integral_gamma^inf Q(d sqrt(x snr / 2)) f_X(x) dx through the
/// Craig representation. With t = d^2 snr / (4 sin^2 theta) the integrand is
///   exp(-gamma t) * sum_j b_j exp(-gamma / lambda_j) / (1 + t lambda_j),
/// evaluated through tail_weights whenever they are available.
inline long double tail_sum(const PairwiseTerms& terms, double snr, const RayleighChannel& ch,
                            double gamma) {
    const auto& lambda = ch.eigenvalues();
    const auto& coeff = ch.coeffs();
    const std::size_t n = lambda.size();
    const std::vector<long double> weights = tail_weights(ch, gamma);
    const bool positive_form = !weights.empty();
    std::vector<long double> q(n), c(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = 1.0L / lambda[n - 1 - i];
    for (std::size_t j = 0; j < n; ++j) c[j] = coeff[j] * std::exp(-static_cast<long double>(gamma) / lambda[j]);
    // exp() of anything below this is zero in double
    constexpr double underflow_arg = 745.2;
    constexpr long double negligible = 1e-22L;

    long double total = 0.0L;
    for (const CraigNode& node : craig_nodes()) {
        const double kappa = snr / (4.0 * node.sin2);
        long double node_sum = 0.0L;
        for (std::size_t k = 0; k < terms.size(); ++k) {
            const double td = terms.squared_distance[k] * kappa;
            const long double t = td;
            const double arg = gamma * td;
            if (arg > underflow_arg) break;  // squared distances ascend
            long double r = 0.0L;
            if (positive_form) {
                long double suffix = 1.0L;
                for (std::size_t i = n; i-- > 0;) {
                    suffix *= q[i] + t;
                    r += weights[i] / suffix;
                }
            } else {
                for (std::size_t j = 0; j < n; ++j) r += c[j] / (1.0L + t * lambda[j]);
            }
            const long double g = gamma == 0.0 ? r : r * static_cast<long double>(std::exp(-arg));
            node_sum += terms.weight[k] * g;
            // g decreases with distance, so every later term is at most
            // g * (remaining weight); stop once that cannot register.
            if (g * terms.weight_suffix[k + 1] < negligible * node_sum) break;
        }
        total += node.weight * node_sum;
    }
    return total > 0.0L ? total : 0.0L;
}

}  // namespace detail

/// integral_gamma^inf Q(d sqrt(x E / (2 sigma^2))) f_X(x) dx for one distance.
inline double pep_tail(double d, const LinkParams& link, const RayleighChannel& ch, double gamma) {
    if (!(d > 0.0)) {
        fail_input("distance must be positive");
    }
    if (!(gamma >= 0.0)) {
        fail_input("threshold must be nonnegative");
    }
    const PairwiseTerms one({d * d}, {1.0}, 2);
    const long double v = detail::tail_sum(one, link.snr, ch, gamma);
    return static_cast<double>(std::min(v, 0.5L));
}

/// G(gamma) = Pr[X < gamma] + sum_d w_d * pep_tail(d, gamma), in long double.
inline long double objective_g_ld(const PairwiseTerms& terms, const LinkParams& link,
                                  const RayleighChannel& ch, double gamma) {
    if (!(gamma >= 0.0)) {
        fail_input("threshold must be nonnegative");
    }
    return ch.cdf_ld(gamma) + detail::tail_sum(terms, link.snr, ch, gamma);
}

inline double objective_G(const PairwiseTerms& terms, const LinkParams& link,
                          const RayleighChannel& ch, double gamma) {
    return static_cast<double>(objective_g_ld(terms, link, ch, gamma));
}

inline double objective_G(const DistanceSpectrum& spec, const LinkParams& link,
                          const RayleighChannel& ch, double gamma) {
    return objective_G(pairwise_terms(spec), link, ch, gamma);
}

/// (1/M) sum_i sum_d A_i(d) * PEP(d); G at gamma = 0, same code path.
inline double union_bound(const PairwiseTerms& terms, const LinkParams& link,
                          const RayleighChannel& ch) {
    return objective_G(terms, link, ch, 0.0);
}

inline double union_bound(const DistanceSpectrum& spec, const LinkParams& link,
                          const RayleighChannel& ch) {
    return union_bound(pairwise_terms(spec), link, ch);
}

/// The sign-carrying factor of dG/dgamma = f_X(gamma) * h(gamma):
///   h(gamma) = 1 - sum_d w_d Q(d sqrt(E gamma / 2)).
/// Increasing in gamma; h(inf) = 1.
inline double stationarity_h(const PairwiseTerms& terms, const LinkParams& link, double gamma) {
    if (!(gamma >= 0.0)) {
        fail_input("threshold must be nonnegative");
    }
    long double s = 0.0L;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        s += terms.weight[k] * q_function(std::sqrt(terms.squared_distance[k] * link.snr * gamma / 2.0));
    }
    return static_cast<double>(1.0L - s);
}

inline double stationarity_h(const DistanceSpectrum& spec, const LinkParams& link, double gamma) {
    return stationarity_h(pairwise_terms(spec), link, gamma);
}

inline constexpr double stationarity_tol = 1e-9;

/// Root of h by bisection; 0 when h(0) >= 0 (then the new bound is the
/// union bound).
inline double find_gamma_star(const PairwiseTerms& terms, const LinkParams& link) {
    if (terms.signal_count < 2) {
        fail_input("need at least two signals");
    }
    if (stationarity_h(terms, link, 0.0) >= 0.0) {
        return 0.0;
    }
    double lo = 0.0;
    double hi = 1.0;
    while (stationarity_h(terms, link, hi) <= 0.0) {
        hi *= 2.0;
        if (hi > 0x1p60) {
            fail_numeric("stationarity root not bracketed");
        }
    }
    double best = hi;
    double best_h = stationarity_h(terms, link, hi);
    for (;;) {
        const double mid = lo + 0.5 * (hi - lo);
        if (!(mid > lo && mid < hi)) break;  // adjacent doubles
        const double hm = stationarity_h(terms, link, mid);
        if (std::abs(hm) < std::abs(best_h)) {
            best = mid;
            best_h = hm;
        }
        if (hm > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
        if (hi - lo < std::max(1e-12, 1e-10 * mid) && std::abs(best_h) < stationarity_tol) {
            break;
        }
    }
    return best;
}

inline double find_gamma_star(const DistanceSpectrum& spec, const LinkParams& link) {
    return find_gamma_star(pairwise_terms(spec), link);
}

struct NewBound {
    double value;
    double gamma_star;
};

/// min over gamma of G, attained at the root of h.
inline NewBound new_bound(const PairwiseTerms& terms, const LinkParams& link,
                          const RayleighChannel& ch) {
    const double g = find_gamma_star(terms, link);
    const double v = objective_G(terms, link, ch, g);
    if (!std::isfinite(v)) {
        fail_numeric("new bound is not finite");
    }
    return {v, g};
}

inline NewBound new_bound(const DistanceSpectrum& spec, const LinkParams& link,
                          const RayleighChannel& ch) {
    return new_bound(pairwise_terms(spec), link, ch);
}

inline BoundPoint evaluate_bounds(const PairwiseTerms& terms, double snr_db,
                                  const RayleighChannel& ch) {
    const LinkParams link = LinkParams::from_db(snr_db);
    const NewBound nb = new_bound(terms, link, ch);
    return {snr_db, union_bound(terms, link, ch), nb.value, nb.gamma_star};
}

/// Finite-difference view of G on a log grid, used to check numerically
/// that G has a single minimiser.
struct ObjectiveScan {
    std::vector<double> gamma;
    std::vector<long double> value;
    /// Sign changes of the slope, ignoring steps whose magnitude is below
    /// `flat_rel` times the local value (rounding-level steps).
    int sign_changes = 0;
};

inline ObjectiveScan scan_objective(const PairwiseTerms& terms, const LinkParams& link,
                                    const RayleighChannel& ch, double lo, double hi,
                                    std::size_t points, long double flat_rel = 1e-15L) {
    ObjectiveScan scan;
    scan.gamma.resize(points);
    scan.value.resize(points);
    const double ratio = std::log(hi / lo) / static_cast<double>(points - 1);
    for (std::size_t k = 0; k < points; ++k) {
        scan.gamma[k] = lo * std::exp(ratio * static_cast<double>(k));
        scan.value[k] = objective_g_ld(terms, link, ch, scan.gamma[k]);
    }
    int last_sign = 0;
    for (std::size_t k = 0; k + 1 < points; ++k) {
        const long double step = scan.value[k + 1] - scan.value[k];
        const long double scale = std::max(std::fabs(scan.value[k]), std::fabs(scan.value[k + 1]));
        if (std::fabs(step) <= flat_rel * scale) continue;
        const int sign = step > 0.0L ? 1 : -1;
        if (last_sign != 0 && sign != last_sign) ++scan.sign_changes;
        last_sign = sign;
    }
    return scan;
}

}  // namespace fadebound
