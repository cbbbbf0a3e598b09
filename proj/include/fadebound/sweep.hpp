// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fadebound/bounds.hpp"
#include "fadebound/channel.hpp"
#include "fadebound/error.hpp"
#include "fadebound/io.hpp"
#include "fadebound/parallel.hpp"
#include "fadebound/scheme.hpp"
#include "fadebound/simulate.hpp"

namespace fadebound {

inline constexpr const char* version = "0.1.0";

struct SweepConfig {
    SchemeSpec scheme;
    ChannelSpec channel;
    double snr_db_start = 0.0;
    double snr_db_stop = 30.0;
    double snr_db_step = 1.0;
    bool compute_union = true;
    bool compute_new = true;
    bool compute_mc = false;
    std::uint64_t mc_trials = 100000;
    std::uint64_t mc_seed = 1;
    std::uint64_t mc_min_errors = 0;
    std::string output_prefix;  // empty: nothing written
    bool svg = false;

    void validate() const {
        if (!std::isfinite(snr_db_start) || !std::isfinite(snr_db_stop) || !std::isfinite(snr_db_step)) {
            fail_input("snr range must be finite");
        }
        if (!(snr_db_step > 0.0)) fail_input("snr_db_step must be positive");
        if (snr_db_start > snr_db_stop) fail_input("snr_db_start must not exceed snr_db_stop");
        if (!compute_union && !compute_new && !compute_mc) fail_input("compute list is empty");
        if (compute_mc) {
            if (scheme.signal_count() > max_simulated_signals) {
                fail_input("mc requested for a scheme with more than 10000 signals");
            }
            if (mc_trials < 1) fail_input("mc_trials must be positive");
        }
    }

    std::vector<double> snr_grid() const {
        std::vector<double> grid;
        const double span = (snr_db_stop - snr_db_start) / snr_db_step;
        const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
        if (n > 100000) fail_input("snr grid has too many points");
        for (std::size_t i = 0; i < n; ++i) {
            grid.push_back(snr_db_start + static_cast<double>(i) * snr_db_step);
        }
        return grid;
    }
};

inline json to_json(const SweepConfig& cfg) {
    json compute = json::array();
    if (cfg.compute_union) compute.push_back("union");
    if (cfg.compute_new) compute.push_back("new");
    if (cfg.compute_mc) compute.push_back("mc");
    return {{"scheme", cfg.scheme.text()},
            {"channel", to_json(cfg.channel)},
            {"snr_db_start", cfg.snr_db_start},
            {"snr_db_stop", cfg.snr_db_stop},
            {"snr_db_step", cfg.snr_db_step},
            {"compute", compute},
            {"mc_trials", cfg.mc_trials},
            {"mc_seed", cfg.mc_seed},
            {"mc_min_errors", cfg.mc_min_errors},
            {"output_prefix", cfg.output_prefix},
            {"svg", cfg.svg}};
}

inline SweepConfig sweep_config_from_json(const json& j) {
    static const std::set<std::string> known = {
        "scheme",   "channel", "snr_db_start",  "snr_db_stop",   "snr_db_step", "compute",
        "mc_trials", "mc_seed", "mc_min_errors", "output_prefix", "svg"};
    if (!j.is_object()) fail_input("config must be a JSON object");
    for (const auto& item : j.items()) {
        if (!known.count(item.key())) fail_input("unknown config key '" + item.key() + "'");
    }
    SweepConfig cfg;
    try {
        cfg.scheme = scheme_from_json(j.at("scheme"));
        cfg.channel = channel_spec_from_json(j.at("channel"));
        cfg.snr_db_start = j.at("snr_db_start").get<double>();
        cfg.snr_db_stop = j.at("snr_db_stop").get<double>();
        cfg.snr_db_step = j.at("snr_db_step").get<double>();
        if (j.contains("compute")) {
            cfg.compute_union = cfg.compute_new = cfg.compute_mc = false;
            for (const auto& c : j.at("compute")) {
                const auto name = c.get<std::string>();
                if (name == "union") cfg.compute_union = true;
                else if (name == "new") cfg.compute_new = true;
                else if (name == "mc") cfg.compute_mc = true;
                else fail_input("unknown compute item '" + name + "'");
            }
        }
        cfg.mc_trials = j.value("mc_trials", cfg.mc_trials);
        cfg.mc_seed = j.value("mc_seed", cfg.mc_seed);
        cfg.mc_min_errors = j.value("mc_min_errors", cfg.mc_min_errors);
        cfg.output_prefix = j.value("output_prefix", cfg.output_prefix);
        cfg.svg = j.value("svg", cfg.svg);
    } catch (const json::exception& e) {
        fail_input(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

inline SweepConfig load_sweep_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_input("cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        fail_input("config '" + path + "' is not valid JSON: " + e.what());
    }
    return sweep_config_from_json(j);
}

struct SweepRow {
    double snr_db = 0.0;
    std::optional<double> union_bound;
    std::optional<double> new_bound;
    std::optional<double> gamma_star;
    std::optional<McEstimate> mc;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    json metadata;

    /// (snr_db, value) for rows where `column` was computed.
    std::vector<std::pair<double, double>> curve(const std::string& column) const {
        std::vector<std::pair<double, double>> out;
        for (const auto& r : rows) {
            std::optional<double> v;
            if (column == "union_bound") v = r.union_bound;
            else if (column == "new_bound") v = r.new_bound;
            else if (column == "gamma_star") v = r.gamma_star;
            else if (column == "mc_bler" && r.mc) v = r.mc->bler;
            else if (column != "mc_bler") fail_input("unknown column '" + column + "'");
            if (v) out.emplace_back(r.snr_db, *v);
        }
        return out;
    }
};

inline const std::vector<std::string>& sweep_csv_header() {
    static const std::vector<std::string> header = {"snr_db",   "union_bound", "new_bound",  "gamma_star",
                                                    "mc_bler",  "mc_ci_low",   "mc_ci_high", "mc_trials"};
    return header;
}

inline CsvTable to_table(const SweepResult& result) {
    CsvTable table;
    table.header = sweep_csv_header();
    for (const auto& r : result.rows) {
        std::vector<std::optional<double>> row = {r.snr_db, r.union_bound, r.new_bound, r.gamma_star};
        if (r.mc) {
            row.insert(row.end(), {r.mc->bler, r.mc->ci_low, r.mc->ci_high, static_cast<double>(r.mc->trials)});
        } else {
            row.insert(row.end(), 4, std::nullopt);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

// ---------------------------------------------------------------------------
// SVG

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
    bool dashed = false;
};

/// Minimal log-scale line chart. Nonpositive values are left out.
inline std::string render_svg(const std::vector<Series>& series, const std::string& title) {
    constexpr double width = 720.0, height = 480.0;
    constexpr double left = 70.0, right = 190.0, top = 40.0, bottom = 50.0;
    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            if (y > 0.0) {
                y_min = std::min(y_min, y);
                y_max = std::max(y_max, y);
            }
        }
    }
    if (!std::isfinite(x_min) || !std::isfinite(y_min)) {
        x_min = 0.0, x_max = 1.0, y_min = 1e-6, y_max = 1.0;
    }
    if (x_max <= x_min) x_max = x_min + 1.0;
    const double dec_lo = std::max(std::floor(std::log10(y_min)), -12.0);
    double dec_hi = std::ceil(std::log10(y_max));
    if (dec_hi <= dec_lo) dec_hi = dec_lo + 1.0;
    const double plot_w = width - left - right, plot_h = height - top - bottom;
    auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
    auto py = [&](double y) {
        const double l = std::clamp(std::log10(y), dec_lo, dec_hi);
        return top + (dec_hi - l) / (dec_hi - dec_lo) * plot_h;
    };
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << left << "\" y=\"24\" font-size=\"14\">" << title << "</text>\n";
    for (double d = dec_lo; d <= dec_hi + 0.5; d += 1.0) {
        const double y = top + (dec_hi - d) / (dec_hi - dec_lo) * plot_h;
        o << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + plot_w << "\" y2=\"" << y
          << "\" stroke=\"#ddd\"/>\n";
        o << "<text x=\"" << left - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << d << "</text>\n";
    }
    const double x_tick = (x_max - x_min) > 20.0 ? 5.0 : 1.0;
    for (double x = std::ceil(x_min / x_tick) * x_tick; x <= x_max + 1e-9; x += x_tick) {
        o << "<line x1=\"" << px(x) << "\" y1=\"" << top << "\" x2=\"" << px(x) << "\" y2=\"" << top + plot_h
          << "\" stroke=\"#eee\"/>\n";
        o << "<text x=\"" << px(x) << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"middle\">" << x
          << "</text>\n";
    }
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    o << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\">SNR (dB)</text>\n";
    o << "<text x=\"18\" y=\"" << top + plot_h / 2 << "\" transform=\"rotate(-90 18 " << top + plot_h / 2
      << ")\" text-anchor=\"middle\">block error probability</text>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* colour = palette[i % std::size(palette)];
        o << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\"";
        if (series[i].dashed) o << " stroke-dasharray=\"6 3\"";
        o << " points=\"";
        for (const auto& [x, y] : series[i].points) {
            if (y > 0.0) o << px(x) << ',' << py(y) << ' ';
        }
        o << "\"/>\n";
        const double ly = top + 16.0 + 18.0 * static_cast<double>(i);
        o << "<line x1=\"" << left + plot_w + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + plot_w + 36
          << "\" y2=\"" << ly - 4 << "\" stroke=\"" << colour << "\" stroke-width=\"2\""
          << (series[i].dashed ? " stroke-dasharray=\"6 3\"" : "") << "/>\n";
        o << "<text x=\"" << left + plot_w + 42 << "\" y=\"" << ly << "\">" << series[i].name << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

inline std::vector<Series> sweep_series(const SweepResult& result, const std::string& prefix = "") {
    std::vector<Series> out;
    const auto add = [&](const std::string& column, const std::string& name, bool dashed) {
        auto pts = result.curve(column);
        if (!pts.empty()) out.push_back({prefix + name, std::move(pts), dashed});
    };
    add("union_bound", "union bound", true);
    add("new_bound", "new bound", false);
    add("mc_bler", "simulation", false);
    return out;
}

// ---------------------------------------------------------------------------
// Output files

/// Writes several files; if any write fails, the ones already written are
/// removed before the error propagates.
class OutputBundle {
public:
    void add(std::string path, std::string content) { files_.emplace_back(std::move(path), std::move(content)); }

    void commit() {
        std::vector<std::string> written;
        try {
            for (const auto& [path, content] : files_) {
                const std::filesystem::path p(path);
                if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
                std::ofstream out(p, std::ios::binary);
                written.push_back(path);
                if (!out || !(out << content) || !out.flush()) {
                    fail_input("cannot write '" + path + "'");
                }
            }
        } catch (...) {
            for (const auto& path : written) {
                std::error_code ec;
                std::filesystem::remove(path, ec);
            }
            throw;
        }
    }

private:
    std::vector<std::pair<std::string, std::string>> files_;
};

// ---------------------------------------------------------------------------
// Sweep

/// Evaluates the requested quantities at every grid SNR. Bound points run on
/// the worker pool; simulation points run in SNR order, each one spreading
/// its trials over the pool.
inline SweepResult compute_sweep(const SweepConfig& cfg, unsigned threads) {
    cfg.validate();
    const std::vector<double> grid = cfg.snr_grid();
    const RayleighChannel ch = build_rayleigh(cfg.channel.correlation());

    std::optional<Constellation> constellation;
    const bool needs_constellation = cfg.compute_mc || cfg.scheme.kind == SchemeSpec::Kind::gaussian ||
                                     cfg.scheme.kind == SchemeSpec::Kind::qpsk;
    if (needs_constellation) constellation.emplace(cfg.scheme.constellation());

    SweepResult result;
    result.rows.resize(grid.size());
    if (cfg.compute_union || cfg.compute_new) {
        const PairwiseTerms terms =
            pairwise_terms(cfg.scheme.spectrum(constellation ? &*constellation : nullptr));
        parallel_for(grid.size(), threads, [&](std::size_t i) {
            const LinkParams link = LinkParams::from_db(grid[i]);
            SweepRow& row = result.rows[i];
            if (cfg.compute_union) {
                const double ub = union_bound(terms, link, ch);
                if (!std::isfinite(ub)) fail_numeric("union bound is not finite");
                row.union_bound = ub;
            }
            if (cfg.compute_new) {
                const NewBound nb = new_bound(terms, link, ch);
                row.new_bound = nb.value;
                row.gamma_star = nb.gamma_star;
            }
        });
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        result.rows[i].snr_db = grid[i];
        if (cfg.compute_mc) {
            result.rows[i].mc = mc_bler(*constellation, ch, LinkParams::from_db(grid[i]), cfg.mc_trials,
                                        cfg.mc_seed, cfg.mc_min_errors, threads);
        }
    }

    json scheme_meta = {{"name", cfg.scheme.text()}, {"M", cfg.scheme.signal_count()}};
    if (constellation) {
        scheme_meta["K"] = constellation->dim();
        if (constellation->seed()) {
            scheme_meta["seed_used"] = *constellation->seed();
            scheme_meta["regenerations"] = constellation->regenerations();
        }
    }
    result.metadata = {{"config", to_json(cfg)},
                       {"scheme", scheme_meta},
                       {"channel", channel_summary(ch)},
                       {"mc_seed", cfg.compute_mc ? json(cfg.mc_seed) : json(nullptr)},
                       {"versions",
                        {{"fadebound", version},
                         {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                       "." + std::to_string(EIGEN_MINOR_VERSION)},
                         {"compiler", __VERSION__}}}};
    return result;
}

/// compute_sweep plus the CSV, metadata JSON and (optionally) SVG outputs
/// under cfg.output_prefix.
inline SweepResult run_sweep(const SweepConfig& cfg, unsigned threads = 1) {
    SweepResult result = compute_sweep(cfg, threads);
    if (!cfg.output_prefix.empty()) {
        OutputBundle bundle;
        std::ostringstream csv;
        write_csv(csv, to_table(result));
        bundle.add(cfg.output_prefix + ".csv", csv.str());
        bundle.add(cfg.output_prefix + ".json", result.metadata.dump(2) + "\n");
        if (cfg.svg) {
            bundle.add(cfg.output_prefix + ".svg", render_svg(sweep_series(result), cfg.scheme.text()));
        }
        bundle.commit();
    }
    return result;
}

// ---------------------------------------------------------------------------
// Gap

namespace detail {

/// First downward crossing of `level`, interpolated linearly in
/// (snr_db, log10 value).
inline std::optional<double> crossing(const std::vector<std::pair<double, double>>& curve, double level) {
    const double tiny = std::numeric_limits<double>::min();
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const auto [x0, y0] = curve[i];
        const auto [x1, y1] = curve[i + 1];
        if (y0 > level && y1 <= level) {
            const double l0 = std::log10(std::max(y0, tiny));
            const double l1 = std::log10(std::max(y1, tiny));
            const double lv = std::log10(level);
            return x0 + (l0 - lv) / (l0 - l1) * (x1 - x0);
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// SNR distance in dB between the points where curve_a and curve_b cross
/// `level`; positive when curve_a crosses further right.
inline double gap_at_level(const std::vector<std::pair<double, double>>& curve_a,
                           const std::vector<std::pair<double, double>>& curve_b, double level) {
    if (!(level > 0.0 && level < 1.0)) fail_input("level must lie in (0, 1)");
    const auto xa = detail::crossing(curve_a, level);
    const auto xb = detail::crossing(curve_b, level);
    if (!xa || !xb) fail_input("level out of range");
    return *xa - *xb;
}

}  // namespace fadebound
