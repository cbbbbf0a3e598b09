// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "fadebound/channel.hpp"
#include "fadebound/constellation.hpp"
#include "fadebound/error.hpp"

namespace fadebound {

using json = nlohmann::json;

/// Shortest decimal string that parses back to exactly `v`.
inline std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_number(const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        fail_input("not a number: '" + text + "'");
    }
    return v;
}

// ---------------------------------------------------------------------------
// JSON

inline json to_json(const Constellation& c) {
    json signals = json::array();
    for (std::size_t i = 0; i < c.count(); ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < c.dim(); ++k) {
            const auto z = c.signals()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
            row.push_back(json::array({z.real(), z.imag()}));
        }
        signals.push_back(std::move(row));
    }
    json out = {{"label", c.label()}, {"K", c.dim()}, {"M", c.count()}, {"signals", std::move(signals)}};
    if (c.seed()) {
        out["seed"] = *c.seed();
        out["regenerations"] = c.regenerations();
    }
    return out;
}

inline Constellation constellation_from_json(const json& j) {
    try {
        const auto m = j.at("M").get<std::size_t>();
        const auto k = j.at("K").get<std::size_t>();
        const json& rows = j.at("signals");
        if (rows.size() != m) fail_input("constellation JSON: signal count does not match M");
        SignalMatrix s(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
        for (std::size_t i = 0; i < m; ++i) {
            if (rows[i].size() != k) fail_input("constellation JSON: signal length does not match K");
            for (std::size_t d = 0; d < k; ++d) {
                s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = {
                    rows[i][d].at(0).get<double>(), rows[i][d].at(1).get<double>()};
            }
        }
        return Constellation::validated(std::move(s), j.value("label", std::string("custom")));
    } catch (const json::exception& e) {
        fail_input(std::string("constellation JSON: ") + e.what());
    }
}

/// {symmetric, M, per_signal: [[{d, count}, ...], ...]}. A symmetric
/// spectrum carries a single list shared by all M signals.
inline json to_json(const DistanceSpectrum& spec) {
    json lists = json::array();
    for (const auto& list : spec.lists()) {
        json entries = json::array();
        for (const auto& e : list) entries.push_back({{"d", e.distance}, {"count", e.count}});
        lists.push_back(std::move(entries));
    }
    return {{"symmetric", spec.symmetric()}, {"M", spec.signal_count()}, {"per_signal", std::move(lists)}};
}

inline DistanceSpectrum spectrum_from_json(const json& j) {
    try {
        const auto m = j.at("M").get<std::size_t>();
        std::vector<SignalSpectrum> lists;
        for (const auto& entries : j.at("per_signal")) {
            SignalSpectrum list;
            for (const auto& e : entries) {
                list.push_back({e.at("d").get<double>(), e.at("count").get<std::uint64_t>()});
            }
            lists.push_back(std::move(list));
        }
        if (j.at("symmetric").get<bool>()) {
            if (lists.size() != 1) fail_input("spectrum JSON: symmetric spectrum needs one list");
            return DistanceSpectrum::shared(m, std::move(lists.front()));
        }
        if (lists.size() != m) fail_input("spectrum JSON: list count does not match M");
        return DistanceSpectrum::per_signal(std::move(lists));
    } catch (const json::exception& e) {
        fail_input(std::string("spectrum JSON: ") + e.what());
    }
}

/// Channel description as it appears in a config file.
struct ChannelSpec {
    std::string model = "rayleigh-exp";
    std::size_t antennas = 1;
    double rho = 0.0;
    ComplexMatrix entries;  // rayleigh-matrix only

    CorrelationMatrix correlation() const {
        if (model == "rayleigh-exp") return exponential_correlation(antennas, rho);
        return CorrelationMatrix(entries);
    }
};

/// {model: "rayleigh-exp", N, rho} or {model: "rayleigh-matrix", entries},
/// where entries is an N x N array of reals or [re, im] pairs.
inline ChannelSpec channel_spec_from_json(const json& j) {
    try {
        ChannelSpec spec;
        spec.model = j.at("model").get<std::string>();
        if (spec.model == "rayleigh-exp") {
            const auto n = j.at("N").get<long long>();
            if (n < 1) fail_input("channel N must be positive");
            spec.antennas = static_cast<std::size_t>(n);
            spec.rho = j.at("rho").get<double>();
            exponential_correlation(spec.antennas, spec.rho);  // validates
        } else if (spec.model == "rayleigh-matrix") {
            const json& rows = j.at("entries");
            const auto n = static_cast<Eigen::Index>(rows.size());
            spec.entries.resize(n, n);
            for (Eigen::Index a = 0; a < n; ++a) {
                if (static_cast<Eigen::Index>(rows[a].size()) != n) {
                    fail_input("invalid correlation matrix: must be square");
                }
                for (Eigen::Index b = 0; b < n; ++b) {
                    const json& v = rows[a][b];
                    spec.entries(a, b) = v.is_array() ? std::complex<double>(v.at(0).get<double>(), v.at(1).get<double>())
                                                      : std::complex<double>(v.get<double>(), 0.0);
                }
            }
            spec.antennas = static_cast<std::size_t>(n);
            CorrelationMatrix check(spec.entries);
        } else {
            fail_input("unknown channel model '" + spec.model + "'");
        }
        return spec;
    } catch (const json::exception& e) {
        fail_input(std::string("channel spec: ") + e.what());
    }
}

inline json to_json(const ChannelSpec& spec) {
    if (spec.model == "rayleigh-exp") {
        return {{"model", spec.model}, {"N", spec.antennas}, {"rho", spec.rho}};
    }
    json rows = json::array();
    for (Eigen::Index a = 0; a < spec.entries.rows(); ++a) {
        json row = json::array();
        for (Eigen::Index b = 0; b < spec.entries.cols(); ++b) {
            row.push_back(json::array({spec.entries(a, b).real(), spec.entries(a, b).imag()}));
        }
        rows.push_back(std::move(row));
    }
    return {{"model", spec.model}, {"entries", std::move(rows)}};
}

inline json channel_summary(const RayleighChannel& ch) {
    return {{"N", ch.order()},
            {"eigenvalues", ch.eigenvalues_double()},
            {"coeffs", ch.coeffs_double()},
            {"perturbed", ch.perturbed()}};
}

// ---------------------------------------------------------------------------
// CSV

/// A parsed CSV file: header names plus rows of optional numbers (empty
/// fields are std::nullopt).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::optional<double>>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        fail_input("CSV has no column '" + name + "'");
    }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline CsvTable parse_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) fail_input("CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    table.header = split_csv_line(line);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != table.header.size()) {
            fail_input("CSV row has " + std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(table.header.size()));
        }
        std::vector<std::optional<double>> row;
        row.reserve(fields.size());
        for (const auto& f : fields) {
            row.push_back(f.empty() ? std::nullopt : std::optional<double>(parse_number(f)));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_input("cannot open '" + path + "'");
    return parse_csv(in);
}

inline void write_csv(std::ostream& out, const CsvTable& table) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        out << (i ? "," : "") << table.header[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            if (row[i]) out << format_number(*row[i]);
        }
        out << '\n';
    }
}

}  // namespace fadebound
