// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fadebound/error.hpp"

namespace fadebound {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Hermitian, unit-diagonal, positive semidefinite N x N antenna correlation.
class CorrelationMatrix {
public:
    explicit CorrelationMatrix(ComplexMatrix entries) : entries_(std::move(entries)) {
        const Eigen::Index n = entries_.rows();
        if (n < 1 || entries_.cols() != n) {
            fail_input("invalid correlation matrix: must be square and non-empty");
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(entries_(i, i) - std::complex<double>(1.0, 0.0)) > 1e-12) {
                fail_input("invalid correlation matrix: diagonal must be 1");
            }
            for (Eigen::Index j = 0; j < n; ++j) {
                if (!std::isfinite(entries_(i, j).real()) || !std::isfinite(entries_(i, j).imag()) ||
                    std::abs(entries_(i, j) - std::conj(entries_(j, i))) > 1e-12) {
                    fail_input("invalid correlation matrix: not Hermitian");
                }
            }
        }
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(entries_, Eigen::EigenvaluesOnly);
        if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() < -1e-10) {
            fail_input("invalid correlation matrix: not positive semidefinite");
        }
    }

    std::size_t order() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    const ComplexMatrix& entries() const noexcept { return entries_; }

private:
    ComplexMatrix entries_;
};

/// R(i, j) = rho^|i - j|.
inline CorrelationMatrix exponential_correlation(std::size_t n, double rho) {
    if (n < 1) {
        fail_input("antenna count must be positive");
    }
    if (!(rho >= 0.0 && rho < 1.0)) {
        fail_input("correlation coefficient must lie in [0, 1)");
    }
    const auto sz = static_cast<Eigen::Index>(n);
    ComplexMatrix r(sz, sz);
    for (Eigen::Index i = 0; i < sz; ++i) {
        for (Eigen::Index j = 0; j < sz; ++j) {
            r(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
        }
    }
    return CorrelationMatrix(std::move(r));
}

/// Relative spread applied to a cluster of `size` coincident eigenvalues.
/// Pairs use 1e-6. The partial-fraction coefficients grow like
/// spread^-(size-1), so larger clusters use 10^(-9/(size-1)), which keeps
/// them below about 1e9 and the rounding in sum_j b_j near 1e-10.
inline double eigen_cluster_spread(std::size_t size) {
    if (size <= 2) return 1e-6;
    return std::max(1e-6, std::pow(10.0, -9.0 / static_cast<double>(size - 1)));
}

/// Correlated Rayleigh channel h = R^{1/2} u. The gain X = ||h||^2 is a sum
/// of independent exponentials with means lambda_j, so
///   f_X(x) = sum_j (b_j / lambda_j) exp(-x / lambda_j),
///   b_j    = lambda_j^{N-1} prod_{n != j} 1 / (lambda_j - lambda_n).
/// The coefficients alternate in sign and can be large, so they and every
/// sum over them are kept in long double.
class RayleighChannel {
public:
    std::size_t order() const noexcept { return order_; }
    /// Distinct positive eigenvalues, descending (zero eigenvalues dropped).
    const std::vector<long double>& eigenvalues() const noexcept { return lambda_; }
    const std::vector<long double>& coeffs() const noexcept { return coeff_; }
    /// V Omega^{1/2} V^H.
    const ComplexMatrix& sqrt_factor() const noexcept { return sqrt_factor_; }
    bool perturbed() const noexcept { return perturbed_; }

    std::vector<double> eigenvalues_double() const { return {lambda_.begin(), lambda_.end()}; }
    std::vector<double> coeffs_double() const { return {coeff_.begin(), coeff_.end()}; }

    long double pdf_ld(long double x) const {
        if (x < 0.0L) return 0.0L;
        long double sum = 0.0L;
        for (std::size_t j = 0; j < lambda_.size(); ++j) {
            sum += coeff_[j] / lambda_[j] * std::exp(-x / lambda_[j]);
        }
        return sum > 0.0L ? sum : 0.0L;
    }

    /// Pr[X > x] = sum_j b_j exp(-x / lambda_j).
    long double survival_ld(long double x) const {
        if (x <= 0.0L) return 1.0L;
        if (x <= lambda_.front()) {
            return 1.0L - cdf_ld(x);
        }
        long double sum = 0.0L;
        for (std::size_t j = 0; j < lambda_.size(); ++j) {
            sum += coeff_[j] * std::exp(-x / lambda_[j]);
        }
        return std::clamp(sum, 0.0L, 1.0L);
    }

    /// Pr[X < x]. Near the origin the partial-fraction sum cancels to
    /// O(x^N) from terms of size |b_j| x / lambda_j, so there the power
    /// series at 0 is used instead.
    long double cdf_ld(long double x) const {
        if (x <= 0.0L) return 0.0L;
        if (x > lambda_.front()) {
            return 1.0L - survival_ld(x);
        }
        if (x * rate_sum_ <= series_limit) return std::clamp(cdf_series(x), 0.0L, 1.0L);
        long double sum = 0.0L;
        for (std::size_t j = 0; j < lambda_.size(); ++j) {
            sum -= coeff_[j] * std::expm1(-x / lambda_[j]);
        }
        return std::clamp(sum, 0.0L, 1.0L);
    }

    /// prod_j r_j * sum_m h_m(-r) x^{N+m} / (N+m)!, with r_j = 1/lambda_j
    /// and h_m the complete homogeneous symmetric polynomial of degree m.
    long double cdf_series(long double x) const {
        const std::size_t n = lambda_.size();
        // partial[j] holds h_m over the first j rates, advanced one m at a time
        std::array<long double, max_order + 1> partial;
        partial.fill(1.0L);
        long double power = 1.0L;
        for (std::size_t i = 1; i <= n; ++i) power *= x / (static_cast<long double>(i) * lambda_[i - 1]);
        long double sum = power;
        for (std::size_t m = 1; m < 400; ++m) {
            power *= x / static_cast<long double>(n + m);
            partial[0] = 0.0L;
            for (std::size_t j = 1; j <= n; ++j) partial[j] = partial[j - 1] - partial[j] / lambda_[j - 1];
            const long double term = partial[n] * power;
            sum += term;
            if (std::fabs(term) <= 1e-21L * std::fabs(sum)) break;
        }
        return sum;
    }

    static constexpr long double series_limit = 8.0L;
    static constexpr std::size_t max_order = 64;

    friend RayleighChannel build_rayleigh(const CorrelationMatrix& r);

private:
    std::size_t order_ = 0;
    std::vector<long double> lambda_;
    std::vector<long double> coeff_;
    ComplexMatrix sqrt_factor_;
    bool perturbed_ = false;
    long double rate_sum_ = 0.0L;
};

inline RayleighChannel build_rayleigh(const CorrelationMatrix& r) {
    const ComplexMatrix& m = r.entries();
    const Eigen::Index n = m.rows();
    if (static_cast<std::size_t>(n) > RayleighChannel::max_order) {
        fail_input("at most 64 antennas are supported");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(m);
    if (eig.info() != Eigen::Success) {
        fail_input("invalid correlation matrix");
    }
    const Eigen::VectorXd& values = eig.eigenvalues();
    const ComplexMatrix& vectors = eig.eigenvectors();
    for (Eigen::Index j = 0; j < n; ++j) {
        const double residual = (m * vectors.col(j) - values(j) * vectors.col(j)).norm();
        if (residual > 1e-10) {
            fail_numeric("eigen-decomposition residual too large");
        }
    }
    if (values.minCoeff() < -1e-10) {
        fail_input("invalid correlation matrix");
    }

    RayleighChannel ch;
    ch.order_ = static_cast<std::size_t>(n);

    Eigen::VectorXd root = values.cwiseMax(0.0).cwiseSqrt();
    ch.sqrt_factor_ = vectors * root.asDiagonal() * vectors.adjoint();

    // Descending eigenvalues; drop numerically zero ones (they carry no gain).
    std::vector<double> sorted(values.data(), values.data() + n);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const double zero_tol = 1e-10 * static_cast<double>(n);
    std::vector<long double> lambda;
    for (double v : sorted) {
        if (v > zero_tol) lambda.push_back(v);
    }

    // Spread clusters of (relatively) coincident eigenvalues symmetrically
    // about their mean so the partial fractions exist; the trace is kept.
    std::vector<long double> spread;
    spread.reserve(lambda.size());
    for (std::size_t a = 0; a < lambda.size();) {
        std::size_t b = a + 1;
        while (b < lambda.size() && (lambda[b - 1] - lambda[b]) < 1e-9L * lambda[b - 1]) ++b;
        const std::size_t size = b - a;
        if (size == 1) {
            spread.push_back(lambda[a]);
        } else {
            ch.perturbed_ = true;
            long double mean = 0.0L;
            for (std::size_t k = a; k < b; ++k) mean += lambda[k];
            mean /= static_cast<long double>(size);
            const long double delta = eigen_cluster_spread(size);
            const long double centre = static_cast<long double>(size - 1) / 2.0L;
            for (std::size_t k = 0; k < size; ++k) {
                spread.push_back(mean * (1.0L + (centre - static_cast<long double>(k)) * delta));
            }
        }
        a = b;
    }
    ch.lambda_ = std::move(spread);

    const std::size_t rank = ch.lambda_.size();
    ch.coeff_.assign(rank, 0.0L);
    for (std::size_t j = 0; j < rank; ++j) {
        long double b = std::pow(ch.lambda_[j], static_cast<long double>(rank - 1));
        for (std::size_t k = 0; k < rank; ++k) {
            if (k != j) b /= (ch.lambda_[j] - ch.lambda_[k]);
        }
        ch.coeff_[j] = b;
        ch.rate_sum_ += 1.0L / ch.lambda_[j];
    }
    return ch;
}

inline double gain_pdf(const RayleighChannel& ch, double x) {
    return static_cast<double>(ch.pdf_ld(x));
}

inline double gain_cdf(const RayleighChannel& ch, double x) {
    return static_cast<double>(ch.cdf_ld(x));
}

/// Draws u ~ CN(0, I_N) and returns h = R^{1/2} u.
template <class Rng>
ComplexVector sample_fading(const RayleighChannel& ch, Rng& rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    const auto n = static_cast<Eigen::Index>(ch.order());
    ComplexVector u(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        u(i) = {re, im};
    }
    return ch.sqrt_factor() * u;
}

}  // namespace fadebound
