// SPDX-License-Identifier: Apache-2.0
//
// fadebound command line: SNR sweeps, figure presets, distance spectra and
// SNR gaps between CSV curves.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "fadebound/fadebound.hpp"

namespace {

using namespace fadebound;

constexpr int exit_config = 2;
constexpr int exit_numeric = 3;

int cmd_sweep(const std::string& config_path, const std::string& out_prefix, unsigned threads) {
    SweepConfig cfg = load_sweep_config(config_path);
    if (!out_prefix.empty()) cfg.output_prefix = out_prefix;
    const SweepResult result = run_sweep(cfg, threads);
    if (cfg.output_prefix.empty()) {
        write_csv(std::cout, to_table(result));
    } else {
        std::cerr << "wrote " << cfg.output_prefix << ".csv (" << result.rows.size() << " rows)\n";
    }
    return 0;
}

int cmd_reproduce(const std::string& name, const std::string& out_dir, const PresetOptions& opts) {
    const PresetReport report = run_preset(name, out_dir, opts);
    std::cout << report.summary.dump(2) << '\n';
    return 0;
}

int cmd_spectrum(const std::string& text, bool brute_force) {
    const SchemeSpec scheme = parse_scheme(text);
    DistanceSpectrum spec;
    if (brute_force) {
        if (!scheme.constructible() || scheme.signal_count() > 50000) {
            fail_input("brute-force spectrum is limited to constructible schemes with at most 50000 signals");
        }
        spec = distance_spectrum(scheme.constellation());
    } else {
        spec = scheme.spectrum();
    }
    std::cout << to_json(spec).dump(2) << '\n';
    return 0;
}

int cmd_gap(const std::string& a_path, std::string b_path, const std::string& a_col, const std::string& b_col,
            double level) {
    if (b_path.empty()) b_path = a_path;
    const auto load = [](const std::string& path, const std::string& column) {
        const CsvTable table = read_csv(path);
        const std::size_t x = table.column("snr_db");
        const std::size_t y = table.column(column);
        std::vector<std::pair<double, double>> curve;
        for (const auto& row : table.rows) {
            if (row[x] && row[y]) curve.emplace_back(*row[x], *row[y]);
        }
        return curve;
    };
    const double gap = gap_at_level(load(a_path, a_col), load(b_path, b_col), level);
    std::cout << format_number(gap) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Error-probability bounds and simulation for ML detection over correlated Rayleigh fading"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads (default: hardware concurrency; FADEBOUND_THREADS overrides)");
    app.set_version_flag("--version", std::string(fadebound::version));

    auto* sweep = app.add_subcommand("sweep", "run an SNR sweep described by a JSON config");
    std::string config_path, out_prefix;
    sweep->add_option("--config", config_path, "config file")->required();
    sweep->add_option("--out", out_prefix, "override output_prefix from the config");

    auto* reproduce = app.add_subcommand("reproduce", "run a figure preset (fig1 to fig5)");
    std::string preset, out_dir;
    fadebound::PresetOptions opts;
    bool no_mc = false;
    reproduce->add_option("preset", preset, "fig1, fig2, fig3, fig4 or fig5")->required();
    reproduce->add_option("--out", out_dir, "output directory")->required();
    reproduce->add_flag("--no-mc", no_mc, "bounds only");
    reproduce->add_option("--mc-trials", opts.mc_trials, "trials per simulated SNR point");
    reproduce->add_option("--level", opts.level, "preferred BLER level for the reported gaps");

    auto* spectrum = app.add_subcommand("spectrum", "print the distance spectrum of a scheme as JSON");
    std::string scheme_text;
    bool brute_force = false;
    spectrum->add_option("--scheme", scheme_text, "orthogonal:M, permutation:L, gaussian:K:M:SEED or qpsk")
        ->required();
    spectrum->add_flag("--brute-force", brute_force, "enumerate all pairs instead of the closed form");

    auto* gap = app.add_subcommand("gap", "SNR gap in dB between two curves at a BLER level");
    std::string a_path, b_path, a_col = "union_bound", b_col = "new_bound";
    double level = 1e-4;
    gap->add_option("--a", a_path, "CSV with the right-hand curve")->required();
    gap->add_option("--b", b_path, "CSV with the left-hand curve (default: same file as --a)");
    gap->add_option("--a-column", a_col, "column of --a (default union_bound)");
    gap->add_option("--b-column", b_col, "column of --b (default new_bound)");
    gap->add_option("--level", level, "BLER level (default 1e-4)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        const unsigned workers = fadebound::resolve_threads(threads);
        if (*sweep) return cmd_sweep(config_path, out_prefix, workers);
        if (*reproduce) {
            opts.mc = !no_mc;
            opts.threads = workers;
            return cmd_reproduce(preset, out_dir, opts);
        }
        if (*spectrum) return cmd_spectrum(scheme_text, brute_force);
        if (*gap) return cmd_gap(a_path, b_path, a_col, b_col, level);
    } catch (const fadebound::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == fadebound::ErrorKind::invalid_input ? exit_config : exit_numeric;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_numeric;
    }
    return 0;
}
