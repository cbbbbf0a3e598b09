// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fadebound/error.hpp"

namespace fadebound {

using Complex = std::complex<double>;
/// One signal per row (M rows, K columns).
using SignalMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double default_bin_tol = 1e-9;
inline constexpr double min_signal_separation = 1e-9;

/// M complex signals of dimension K with unit average energy.
class Constellation {
public:
    std::size_t dim() const noexcept { return static_cast<std::size_t>(signals_.cols()); }
    std::size_t count() const noexcept { return static_cast<std::size_t>(signals_.rows()); }
    const SignalMatrix& signals() const noexcept { return signals_; }
    auto signal(std::size_t i) const { return signals_.row(static_cast<Eigen::Index>(i)); }
    /// ||s_i||^2
    double energy(std::size_t i) const { return energies_[i]; }
    const std::string& label() const noexcept { return label_; }

    /// Factor the raw input was multiplied by during normalization.
    double scale() const noexcept { return scale_; }
    /// Generator seed actually used (random constellations only).
    std::optional<std::uint64_t> seed() const noexcept { return seed_; }
    /// Number of redraws caused by repeated signals (random constellations only).
    unsigned regenerations() const noexcept { return regenerations_; }

    double average_energy() const {
        return std::accumulate(energies_.begin(), energies_.end(), 0.0) /
               static_cast<double>(count());
    }

    /// Checks the unit-energy and distinct-signal invariants on already
    /// normalized data (e.g. a deserialized constellation).
    static Constellation validated(SignalMatrix signals, std::string label) {
        Constellation c(std::move(signals), std::move(label), 1.0);
        if (c.count() < 2) {
            fail_input("constellation needs at least two signals");
        }
        if (std::abs(c.average_energy() - 1.0) > 1e-12) {
            fail_input("constellation is not normalized to unit average energy");
        }
        c.require_distinct();
        return c;
    }

private:
    Constellation(SignalMatrix signals, std::string label, double scale)
        : signals_(std::move(signals)), label_(std::move(label)), scale_(scale) {
        energies_.resize(count());
        for (std::size_t i = 0; i < count(); ++i) {
            energies_[i] = signal(i).squaredNorm();
        }
    }

    void require_distinct() const {
        const auto m = static_cast<Eigen::Index>(count());
        const double tol2 = min_signal_separation * min_signal_separation;
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index k = i + 1; k < m; ++k) {
                if ((signals_.row(i) - signals_.row(k)).squaredNorm() <= tol2) {
                    fail_input("repeated signal");
                }
            }
        }
    }

    friend Constellation normalize(const SignalMatrix& raw, std::string label);
    friend Constellation gen_orthogonal(std::size_t m);
    friend Constellation gen_permutation(std::size_t l);
    friend Constellation gen_gaussian(std::size_t k, std::size_t m, std::uint64_t seed);

    SignalMatrix signals_;
    std::vector<double> energies_;
    std::string label_;
    double scale_ = 1.0;
    std::optional<std::uint64_t> seed_;
    unsigned regenerations_ = 0;
};

/// Scales every signal by one positive factor so the average energy is 1.
inline Constellation normalize(const SignalMatrix& raw, std::string label = "custom") {
    if (raw.rows() < 2) {
        fail_input("constellation needs at least two signals");
    }
    if (raw.cols() < 1) {
        fail_input("constellation dimension must be positive");
    }
    const double mean_energy = raw.squaredNorm() / static_cast<double>(raw.rows());
    if (!(mean_energy > 0.0) || !std::isfinite(mean_energy)) {
        fail_input("degenerate constellation");
    }
    const double scale = 1.0 / std::sqrt(mean_energy);
    Constellation c(raw * scale, std::move(label), scale);
    c.require_distinct();
    return c;
}

inline Constellation gen_qpsk() {
    SignalMatrix s(4, 1);
    s << Complex(1, 0), Complex(0, 1), Complex(-1, 0), Complex(0, -1);
    return normalize(s, "qpsk");
}

/// Standard basis of dimension M; already unit energy.
inline Constellation gen_orthogonal(std::size_t m) {
    if (m < 2) {
        fail_input("orthogonal signalling needs M >= 2");
    }
    const auto n = static_cast<Eigen::Index>(m);
    SignalMatrix s = SignalMatrix::Identity(n, n);
    return Constellation(std::move(s), "orthogonal-M" + std::to_string(m), 1.0);
}

inline constexpr std::size_t max_permutation_order = 10;

/// Binary code of all L! permutations in lexicographic order. Slot l
/// (length L) holds a single one at position pi(l); every codeword is
/// then scaled by 1/sqrt(L).
inline Constellation gen_permutation(std::size_t l) {
    if (l < 2 || l > max_permutation_order) {
        fail_input("permutation size unsupported");
    }
    std::size_t m = 1;
    for (std::size_t i = 2; i <= l; ++i) m *= i;
    const double amp = 1.0 / std::sqrt(static_cast<double>(l));
    SignalMatrix s = SignalMatrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(l * l));
    std::vector<std::size_t> perm(l);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Eigen::Index row = 0;
    do {
        for (std::size_t slot = 0; slot < l; ++slot) {
            s(row, static_cast<Eigen::Index>(slot * l + perm[slot])) = amp;
        }
        ++row;
    } while (std::next_permutation(perm.begin(), perm.end()));
    // Codewords are distinct by construction; skip the O(M^2) check.
    return Constellation(std::move(s), "permutation-L" + std::to_string(l),
                         amp);
}

/// M i.i.d. CN(0, I_K) draws from mt19937_64(seed), then normalized. A draw
/// that repeats a signal is discarded and redrawn from seed + 1.
inline Constellation gen_gaussian(std::size_t k, std::size_t m, std::uint64_t seed) {
    if (m < 2) {
        fail_input("gaussian code needs M >= 2");
    }
    if (k < 1) {
        fail_input("gaussian code needs K >= 1");
    }
    const std::string label =
        "gaussian-K" + std::to_string(k) + "-M" + std::to_string(m) + "-seed" + std::to_string(seed);
    for (unsigned attempt = 0; attempt < 64; ++attempt) {
        const std::uint64_t s = seed + attempt;
        std::mt19937_64 gen(s);
        std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
        SignalMatrix raw(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
        for (Eigen::Index i = 0; i < raw.rows(); ++i) {
            for (Eigen::Index j = 0; j < raw.cols(); ++j) {
                const double re = normal(gen);
                const double im = normal(gen);
                raw(i, j) = Complex(re, im);
            }
        }
        try {
            Constellation c = normalize(raw, label);
            c.seed_ = s;
            c.regenerations_ = attempt;
            return c;
        } catch (const Error&) {
            // repeated signal; redraw
        }
    }
    fail_numeric("gaussian code generation kept producing repeated signals");
}

// ---------------------------------------------------------------------------
// Distance spectra

struct SpectrumEntry {
    double distance;
    std::uint64_t count;

    friend bool operator==(const SpectrumEntry&, const SpectrumEntry&) = default;
};

using SignalSpectrum = std::vector<SpectrumEntry>;

/// Per-signal multiset of (distance, count). When every signal has the same
/// spectrum only one list is stored and shared by all M signals.
class DistanceSpectrum {
public:
    DistanceSpectrum() = default;

    static DistanceSpectrum shared(std::size_t m, SignalSpectrum list) {
        DistanceSpectrum s;
        s.count_ = m;
        s.symmetric_ = true;
        s.lists_.push_back(std::move(list));
        return s;
    }

    static DistanceSpectrum per_signal(std::vector<SignalSpectrum> lists) {
        DistanceSpectrum s;
        s.count_ = lists.size();
        const bool same = std::all_of(lists.begin(), lists.end(),
                                      [&](const SignalSpectrum& x) { return x == lists.front(); });
        if (same && !lists.empty()) {
            s.symmetric_ = true;
            s.lists_.push_back(std::move(lists.front()));
        } else {
            s.symmetric_ = false;
            s.lists_ = std::move(lists);
        }
        return s;
    }

    std::size_t signal_count() const noexcept { return count_; }
    bool symmetric() const noexcept { return symmetric_; }
    const SignalSpectrum& for_signal(std::size_t i) const {
        return symmetric_ ? lists_.front() : lists_.at(i);
    }
    /// Stored lists: one when symmetric, otherwise M.
    const std::vector<SignalSpectrum>& lists() const noexcept { return lists_; }

private:
    std::size_t count_ = 0;
    bool symmetric_ = false;
    std::vector<SignalSpectrum> lists_;
};

inline std::int64_t distance_bin(double squared_distance, double bin_tol) {
    return std::llround(squared_distance / bin_tol);
}

/// Brute-force spectrum: all M(M-1) ordered pairs, squared distances grouped
/// into multiples of bin_tol. Each entry reports sqrt of the mean squared
/// distance of its bin.
inline DistanceSpectrum distance_spectrum(const Constellation& c, double bin_tol = default_bin_tol) {
    if (!(bin_tol > 0.0)) {
        fail_input("bin tolerance must be positive");
    }
    const std::size_t m = c.count();
    const SignalMatrix& s = c.signals();
    std::vector<SignalSpectrum> lists(m);
    std::vector<std::pair<std::int64_t, double>> keyed;
    keyed.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        keyed.clear();
        for (std::size_t k = 0; k < m; ++k) {
            if (k == i) continue;
            const double d2 = (s.row(static_cast<Eigen::Index>(i)) - s.row(static_cast<Eigen::Index>(k))).squaredNorm();
            keyed.emplace_back(distance_bin(d2, bin_tol), d2);
        }
        std::sort(keyed.begin(), keyed.end());
        SignalSpectrum& out = lists[i];
        for (std::size_t a = 0; a < keyed.size();) {
            std::size_t b = a;
            double sum = 0.0;
            while (b < keyed.size() && keyed[b].first == keyed[a].first) {
                sum += keyed[b].second;
                ++b;
            }
            out.push_back({std::sqrt(sum / static_cast<double>(b - a)), static_cast<std::uint64_t>(b - a)});
            a = b;
        }
    }
    // Symmetry is decided on binned keys, not on the representative values.
    bool same = true;
    for (std::size_t i = 1; i < m && same; ++i) {
        if (lists[i].size() != lists[0].size()) {
            same = false;
            break;
        }
        for (std::size_t e = 0; e < lists[i].size(); ++e) {
            if (lists[i][e].count != lists[0][e].count ||
                distance_bin(lists[i][e].distance * lists[i][e].distance, bin_tol) !=
                    distance_bin(lists[0][e].distance * lists[0][e].distance, bin_tol)) {
                same = false;
                break;
            }
        }
    }
    if (same) {
        return DistanceSpectrum::shared(m, std::move(lists.front()));
    }
    return DistanceSpectrum::per_signal(std::move(lists));
}

/// Same signal count and, signal by signal, the same binned distances with
/// the same counts.
inline bool equivalent(const DistanceSpectrum& a, const DistanceSpectrum& b,
                       double bin_tol = default_bin_tol) {
    if (a.signal_count() != b.signal_count()) return false;
    const std::size_t m = (a.symmetric() && b.symmetric()) ? 1 : a.signal_count();
    for (std::size_t i = 0; i < m; ++i) {
        const auto& x = a.for_signal(i);
        const auto& y = b.for_signal(i);
        if (x.size() != y.size()) return false;
        for (std::size_t e = 0; e < x.size(); ++e) {
            if (x[e].count != y[e].count ||
                distance_bin(x[e].distance * x[e].distance, bin_tol) !=
                    distance_bin(y[e].distance * y[e].distance, bin_tol)) {
                return false;
            }
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Closed-form combinatorics

inline constexpr unsigned max_exact_count_order = 20;

/// Number of fixed-point-free permutations of n elements,
/// !n = (n-1)(!(n-1) + !(n-2)).
inline std::uint64_t derangements(unsigned n) {
    if (n > max_exact_count_order) {
        fail_input("count overflow");
    }
    if (n == 0) return 1;
    std::uint64_t prev = 1;  // !0
    std::uint64_t cur = 0;   // !1
    for (unsigned k = 2; k <= n; ++k) {
        const std::uint64_t next = (k - 1) * (cur + prev);
        prev = cur;
        cur = next;
    }
    return cur;
}

inline std::uint64_t binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (unsigned i = 1; i <= k; ++i) {
        // r * (n - k + i) is divisible by i at every step
        std::uint64_t t;
        if (__builtin_mul_overflow(r, static_cast<std::uint64_t>(n - k + i), &t)) {
            fail_input("count overflow");
        }
        r = t / i;
    }
    return r;
}

inline DistanceSpectrum analytic_spectrum_orthogonal(std::size_t m) {
    if (m < 2) {
        fail_input("orthogonal signalling needs M >= 2");
    }
    return DistanceSpectrum::shared(m, {{std::numbers::sqrt2, static_cast<std::uint64_t>(m - 1)}});
}

/// Permutation codes: a codeword whose relative permutation moves m of the
/// L positions sits at d = sqrt(2m/L), and there are !m * C(L, m) of them.
inline DistanceSpectrum analytic_spectrum_permutation(unsigned l) {
    if (l < 2 || l > max_exact_count_order) {
        fail_input("permutation size unsupported");
    }
    std::uint64_t m_total = 1;
    for (unsigned i = 2; i <= l; ++i) m_total *= i;
    SignalSpectrum list;
    for (unsigned moved = 2; moved <= l; ++moved) {
        std::uint64_t count;
        if (__builtin_mul_overflow(derangements(moved), binomial(l, moved), &count)) {
            fail_input("count overflow");
        }
        list.push_back({std::sqrt(2.0 * moved / static_cast<double>(l)), count});
    }
    return DistanceSpectrum::shared(static_cast<std::size_t>(m_total), std::move(list));
}

}  // namespace fadebound
