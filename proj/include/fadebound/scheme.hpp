// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fadebound/constellation.hpp"
#include "fadebound/error.hpp"
#include "fadebound/io.hpp"

namespace fadebound {

/// A signalling scheme by name and parameters, before anything is built.
struct SchemeSpec {
    enum class Kind { orthogonal, permutation, gaussian, qpsk };

    Kind kind = Kind::qpsk;
    std::size_t m = 4;        // orthogonal, gaussian
    unsigned l = 0;           // permutation
    std::size_t k = 1;        // gaussian
    std::uint64_t seed = 0;   // gaussian

    static SchemeSpec orthogonal(std::size_t m) { return {Kind::orthogonal, m, 0, m, 0}; }
    static SchemeSpec permutation(unsigned l) { return {Kind::permutation, 0, l, 0, 0}; }
    static SchemeSpec gaussian(std::size_t k, std::size_t m, std::uint64_t seed) {
        return {Kind::gaussian, m, 0, k, seed};
    }
    static SchemeSpec qpsk() { return {}; }

    /// M; for permutation codes L! (saturating at UINT64_MAX).
    std::uint64_t signal_count() const {
        switch (kind) {
            case Kind::orthogonal:
            case Kind::gaussian:
                return m;
            case Kind::qpsk:
                return 4;
            case Kind::permutation: {
                std::uint64_t f = 1;
                for (unsigned i = 2; i <= l; ++i) {
                    if (f > UINT64_MAX / i) return UINT64_MAX;
                    f *= i;
                }
                return f;
            }
        }
        return 0;
    }

    /// Canonical text form, also accepted by parse_scheme.
    std::string text() const {
        switch (kind) {
            case Kind::orthogonal:
                return "orthogonal:" + std::to_string(m);
            case Kind::permutation:
                return "permutation:" + std::to_string(l);
            case Kind::gaussian:
                return "gaussian:" + std::to_string(k) + ":" + std::to_string(m) + ":" + std::to_string(seed);
            case Kind::qpsk:
                return "qpsk";
        }
        return {};
    }

    /// Whether a constellation can be materialised (permutation codes are
    /// capped by the generator's size limit).
    bool constructible() const {
        return kind != Kind::permutation || l <= max_permutation_order;
    }

    Constellation constellation() const {
        switch (kind) {
            case Kind::orthogonal:
                return gen_orthogonal(m);
            case Kind::permutation:
                return gen_permutation(l);
            case Kind::gaussian:
                return gen_gaussian(k, m, seed);
            case Kind::qpsk:
                return gen_qpsk();
        }
        fail_input("unknown scheme");
    }

    /// Closed-form spectrum where one exists, brute force otherwise.
    DistanceSpectrum spectrum(const Constellation* built = nullptr) const {
        switch (kind) {
            case Kind::orthogonal:
                return analytic_spectrum_orthogonal(m);
            case Kind::permutation:
                return analytic_spectrum_permutation(l);
            case Kind::gaussian:
            case Kind::qpsk:
                return built ? distance_spectrum(*built) : distance_spectrum(constellation());
        }
        fail_input("unknown scheme");
    }
};

namespace detail {

inline std::uint64_t parse_count(const std::string& field, const std::string& what) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        fail_input("scheme: " + what + " must be a nonnegative integer, got '" + field + "'");
    }
    return v;
}

}  // namespace detail

/// "orthogonal:M", "permutation:L", "gaussian:K:M:SEED" or "qpsk".
inline SchemeSpec parse_scheme(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const std::size_t colon = text.find(':', start);
        parts.push_back(text.substr(start, colon - start));
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    const std::string& name = parts.front();
    SchemeSpec spec;
    if (name == "qpsk" && parts.size() == 1) {
        return SchemeSpec::qpsk();
    }
    if (name == "orthogonal" && parts.size() == 2) {
        spec = SchemeSpec::orthogonal(detail::parse_count(parts[1], "M"));
        if (spec.m < 2) fail_input("scheme: orthogonal needs M >= 2");
        return spec;
    }
    if (name == "permutation" && parts.size() == 2) {
        const std::uint64_t l = detail::parse_count(parts[1], "L");
        if (l < 2 || l > max_exact_count_order) fail_input("permutation size unsupported");
        return SchemeSpec::permutation(static_cast<unsigned>(l));
    }
    if (name == "gaussian" && parts.size() == 4) {
        spec = SchemeSpec::gaussian(detail::parse_count(parts[1], "K"), detail::parse_count(parts[2], "M"),
                                    detail::parse_count(parts[3], "seed"));
        if (spec.k < 1) fail_input("scheme: gaussian needs K >= 1");
        if (spec.m < 2) fail_input("scheme: gaussian needs M >= 2");
        return spec;
    }
    fail_input("unknown scheme '" + text + "' (expected orthogonal:M, permutation:L, gaussian:K:M:SEED or qpsk)");
}

/// Accepts the text form or an object {type, M | L | K, M, seed}.
inline SchemeSpec scheme_from_json(const json& j) {
    if (j.is_string()) return parse_scheme(j.get<std::string>());
    try {
        const auto type = j.at("type").get<std::string>();
        if (type == "qpsk") return parse_scheme("qpsk");
        if (type == "orthogonal") return parse_scheme("orthogonal:" + std::to_string(j.at("M").get<std::uint64_t>()));
        if (type == "permutation") return parse_scheme("permutation:" + std::to_string(j.at("L").get<std::uint64_t>()));
        if (type == "gaussian") {
            return parse_scheme("gaussian:" + std::to_string(j.at("K").get<std::uint64_t>()) + ":" +
                                std::to_string(j.at("M").get<std::uint64_t>()) + ":" +
                                std::to_string(j.at("seed").get<std::uint64_t>()));
        }
        fail_input("unknown scheme type '" + type + "'");
    } catch (const json::exception& e) {
        fail_input(std::string("scheme: ") + e.what());
    }
}

}  // namespace fadebound
