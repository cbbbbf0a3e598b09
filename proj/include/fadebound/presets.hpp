// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fadebound/error.hpp"
#include "fadebound/io.hpp"
#include "fadebound/sweep.hpp"

namespace fadebound {

/// Figure-reproduction presets. Every preset sweeps 0 to 40 dB in 1 dB
/// steps; bound gaps are read at 1e-4, or at the deepest decade level both
/// curves reach when a curve stays above 1e-4 over the whole sweep.
struct PresetCase {
    std::string label;
    SweepConfig config;
    std::string group;  // cases in one group are compared against each other
};

struct PresetOptions {
    bool mc = true;
    std::uint64_t mc_trials = 20000;
    std::size_t mc_max_signals = 1000;
    unsigned threads = 1;
    double level = 1e-4;
};

struct GapMeasure {
    double level = 0.0;
    double gap_db = 0.0;
};

/// Gap at `preferred`, else at 1e-3, 1e-2, 1e-1 (first one both curves cross).
inline GapMeasure gap_with_fallback(const std::vector<std::pair<double, double>>& a,
                                    const std::vector<std::pair<double, double>>& b, double preferred) {
    std::vector<double> levels = {preferred};
    for (double l = 1e-3; l < 0.5; l *= 10.0) {
        if (l > preferred * 1.000001) levels.push_back(l);
    }
    for (double l : levels) {
        if (detail::crossing(a, l) && detail::crossing(b, l)) {
            return {l, gap_at_level(a, b, l)};
        }
    }
    fail_input("level out of range");
}

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"fig1", "fig2", "fig3", "fig4", "fig5"};
    return names;
}

inline std::vector<PresetCase> preset_cases(const std::string& name, const PresetOptions& opts = {}) {
    const auto base = [&](SchemeSpec scheme, std::size_t n, double rho) {
        SweepConfig cfg;
        cfg.scheme = scheme;
        cfg.channel.model = "rayleigh-exp";
        cfg.channel.antennas = n;
        cfg.channel.rho = rho;
        cfg.snr_db_start = 0.0;
        cfg.snr_db_stop = 40.0;
        cfg.snr_db_step = 1.0;
        cfg.compute_mc = opts.mc && scheme.signal_count() <= opts.mc_max_signals;
        cfg.mc_trials = opts.mc_trials;
        cfg.mc_seed = 1;
        cfg.svg = true;
        return cfg;
    };
    std::vector<PresetCase> cases;
    if (name == "fig1" || name == "fig2" || name == "fig3") {
        const std::size_t n = name == "fig1" ? 2 : 4;
        const double rho = name == "fig3" ? 0.5 : 0.1;
        for (std::size_t m : {16u, 512u}) {
            cases.push_back({"orthogonal_M" + std::to_string(m), base(SchemeSpec::orthogonal(m), n, rho),
                             "M" + std::to_string(m)});
        }
    } else if (name == "fig4") {
        for (unsigned l : {3u, 6u, 9u}) {
            cases.push_back({"permutation_L" + std::to_string(l), base(SchemeSpec::permutation(l), 2, 0.1),
                             "L" + std::to_string(l)});
        }
    } else if (name == "fig5") {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            for (std::size_t m : {10u, 300u}) {
                PresetCase c{"gaussian_M" + std::to_string(m) + "_seed" + std::to_string(seed),
                             base(SchemeSpec::gaussian(9, m, seed), 2, 0.1), "M" + std::to_string(m)};
                // one seed is enough for the simulated reference curve
                c.config.compute_mc = c.config.compute_mc && seed == 1;
                cases.push_back(std::move(c));
            }
        }
    } else {
        fail_input("unknown preset '" + name + "' (expected fig1 to fig5)");
    }
    return cases;
}

struct PresetCaseResult {
    std::string label;
    std::string group;
    SweepResult result;
    std::optional<GapMeasure> gap;
};

struct PresetReport {
    std::string name;
    std::vector<PresetCaseResult> cases;
    json summary;

    const PresetCaseResult& find(const std::string& label) const {
        for (const auto& c : cases) {
            if (c.label == label) return c;
        }
        fail_input("no preset case '" + label + "'");
    }
};

/// Runs every case of a preset. With a non-empty `out_dir` each case gets
/// a CSV and metadata JSON, and the preset gets one SVG with all curves and
/// a summary JSON with the measured gaps.
inline PresetReport run_preset(const std::string& name, const std::string& out_dir, const PresetOptions& opts = {}) {
    PresetReport report;
    report.name = name;
    json cases_json = json::array();
    std::vector<Series> series;
    for (auto& pc : preset_cases(name, opts)) {
        PresetCaseResult r{pc.label, pc.group, compute_sweep(pc.config, opts.threads), std::nullopt};
        json entry = {{"label", pc.label}, {"scheme", pc.config.scheme.text()}};
        try {
            r.gap = gap_with_fallback(r.result.curve("union_bound"), r.result.curve("new_bound"), opts.level);
            entry["gap_db"] = r.gap->gap_db;
            entry["level"] = r.gap->level;
        } catch (const Error&) {
            entry["gap_db"] = nullptr;
        }
        if (r.result.metadata["scheme"].contains("seed_used")) {
            entry["seed_used"] = r.result.metadata["scheme"]["seed_used"];
        }
        for (auto& s : sweep_series(r.result, pc.label + " ")) series.push_back(std::move(s));
        cases_json.push_back(std::move(entry));
        report.cases.push_back(std::move(r));
    }
    json groups = json::object();
    for (const auto& c : report.cases) {
        if (!c.gap) continue;
        json& g = groups[c.group];
        if (g.is_null()) g = {{"gaps_db", json::array()}};
        g["gaps_db"].push_back(c.gap->gap_db);
    }
    for (auto& [key, g] : groups.items()) {
        const auto gaps = g["gaps_db"].get<std::vector<double>>();
        double sum = 0.0;
        for (double v : gaps) sum += v;
        g["mean_db"] = sum / static_cast<double>(gaps.size());
        g["min_db"] = *std::min_element(gaps.begin(), gaps.end());
        g["max_db"] = *std::max_element(gaps.begin(), gaps.end());
    }
    report.summary = {{"preset", name}, {"preferred_level", opts.level}, {"cases", cases_json}, {"groups", groups}};

    if (!out_dir.empty()) {
        OutputBundle bundle;
        const std::filesystem::path dir(out_dir);
        for (const auto& c : report.cases) {
            std::ostringstream csv;
            write_csv(csv, to_table(c.result));
            bundle.add((dir / (name + "_" + c.label + ".csv")).string(), csv.str());
            bundle.add((dir / (name + "_" + c.label + ".json")).string(), c.result.metadata.dump(2) + "\n");
        }
        bundle.add((dir / (name + ".svg")).string(), render_svg(series, name));
        bundle.add((dir / (name + "_summary.json")).string(), report.summary.dump(2) + "\n");
        bundle.commit();
    }
    return report;
}

}  // namespace fadebound
