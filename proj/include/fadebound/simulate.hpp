// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "fadebound/bounds.hpp"
#include "fadebound/channel.hpp"
#include "fadebound/constellation.hpp"
#include "fadebound/error.hpp"
#include "fadebound/numeric.hpp"
#include "fadebound/parallel.hpp"
#include "fadebound/random.hpp"

namespace fadebound {

struct McEstimate {
    std::uint64_t trials = 0;
    std::uint64_t errors = 0;
    double bler = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    std::uint64_t seed = 0;
};

/// Largest constellation the exhaustive ML search is run on.
inline constexpr std::size_t max_simulated_signals = 10000;

/// ML decision for the received block r (N*K entries, antenna-major: entry
/// n*K + k is antenna n, dimension k) given fading h. Maximises
///   xi_k = 2 Re{r^H H s_k} - sqrt(E) ||s_k||^2 ||h||^2,  H = h (x) I_K.
/// Ties go to the lowest index.
inline std::size_t ml_detect(const ComplexVector& r, const ComplexVector& h,
                             const Constellation& c, double energy) {
    const auto k = static_cast<Eigen::Index>(c.dim());
    const Eigen::Index n = h.size();
    if (n < 1 || r.size() != n * k) {
        fail_input("received block dimension does not match channel and constellation");
    }
    // r^H H s = y^H s with y = sum_n conj(h_n) r_n
    ComplexVector y = ComplexVector::Zero(k);
    for (Eigen::Index a = 0; a < n; ++a) {
        y += std::conj(h(a)) * r.segment(a * k, k);
    }
    const double gain = h.squaredNorm();
    const double amp = std::sqrt(energy);
    const Eigen::VectorXd corr = (c.signals() * y.conjugate()).real();
    std::size_t best = 0;
    double best_xi = 0.0;
    for (std::size_t i = 0; i < c.count(); ++i) {
        const double xi = 2.0 * corr(static_cast<Eigen::Index>(i)) - amp * c.energy(i) * gain;
        if (i == 0 || xi > best_xi) {
            best = i;
            best_xi = xi;
        }
    }
    return best;
}

namespace detail {

/// Uniform integer in [0, bound) by rejection, independent of the
/// standard library's distribution implementation.
inline std::size_t uniform_index(Xoshiro256& rng, std::size_t bound) {
    const std::uint64_t b = bound;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % b;
    for (;;) {
        const std::uint64_t v = rng();
        if (v < limit) return static_cast<std::size_t>(v % b);
    }
}

/// One trial on its own stream; true when ML detection errs.
inline bool simulate_trial(const Constellation& c, const RayleighChannel& ch, double energy,
                           std::uint64_t seed, std::uint64_t trial) {
    Xoshiro256 rng = Xoshiro256::for_stream(seed, trial);
    const ComplexVector h = sample_fading(ch, rng);
    const std::size_t sent = uniform_index(rng, c.count());
    const auto k = static_cast<Eigen::Index>(c.dim());
    const Eigen::Index n = h.size();
    const double amp = std::sqrt(energy);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    ComplexVector r(n * k);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) {
            const double re = normal(rng);
            const double im = normal(rng);
            r(a * k + b) = amp * h(a) * c.signals()(static_cast<Eigen::Index>(sent), b) +
                           std::complex<double>(re, im);
        }
    }
    return ml_detect(r, h, c, energy) != sent;
}

}  // namespace detail

/// Monte Carlo block error rate of ML detection. Trial t always uses the
/// stream (seed, t), and early stopping scans outcomes in trial order, so
/// the estimate does not depend on `threads`. With min_errors > 0 the run
/// stops at the first trial where errors >= min_errors and
/// trials >= 10 * min_errors.
inline McEstimate mc_bler(const Constellation& c, const RayleighChannel& ch, const LinkParams& link,
                          std::uint64_t trials, std::uint64_t seed, std::uint64_t min_errors = 0,
                          unsigned threads = 1) {
    if (trials < 1) {
        fail_input("trial count must be positive");
    }
    if (c.count() > max_simulated_signals) {
        fail_input("simulation limited to at most 10000 signals");
    }
    constexpr std::uint64_t batch = 8192;
    constexpr std::size_t chunk = 256;
    std::vector<unsigned char> outcome;
    McEstimate est;
    est.seed = seed;
    std::uint64_t done = 0;
    bool stopped = false;
    while (done < trials && !stopped) {
        const std::uint64_t size = std::min(batch, trials - done);
        outcome.assign(size, 0);
        const std::size_t chunks = static_cast<std::size_t>((size + chunk - 1) / chunk);
        parallel_for(chunks, threads, [&](std::size_t ci) {
            const std::uint64_t lo = ci * chunk;
            const std::uint64_t hi = std::min<std::uint64_t>(size, lo + chunk);
            for (std::uint64_t t = lo; t < hi; ++t) {
                outcome[t] = detail::simulate_trial(c, ch, link.snr, seed, done + t) ? 1 : 0;
            }
        });
        for (std::uint64_t t = 0; t < size; ++t) {
            est.errors += outcome[t];
            ++est.trials;
            if (min_errors > 0 && est.errors >= min_errors && est.trials >= 10 * min_errors) {
                stopped = true;
                break;
            }
        }
        done += size;
    }
    est.bler = static_cast<double>(est.errors) / static_cast<double>(est.trials);
    const auto ci = wilson_interval(est.errors, est.trials);
    est.ci_low = ci.first;
    est.ci_high = ci.second;
    return est;
}

}  // namespace fadebound
