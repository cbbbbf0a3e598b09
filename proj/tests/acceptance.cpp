// SPDX-License-Identifier: Apache-2.0
//
// Acceptance checks 1-12. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Pass criterion numbers as arguments to run
// a subset, e.g. `acceptance 2 3 4`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fadebound/fadebound.hpp"
#include "oracles.hpp"

using namespace fadebound;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

// ---------------------------------------------------------------------------
// Shared acceptance grid

struct GridScheme {
    std::string name;
    PairwiseTerms terms;
    std::uint64_t m;
};

struct GridChannel {
    std::string name;
    std::size_t n;
    double rho;
    RayleighChannel ch;
};

const std::vector<GridScheme>& grid_schemes() {
    static const std::vector<GridScheme> schemes = [] {
        std::vector<GridScheme> out;
        for (const char* text : {"qpsk", "orthogonal:16", "orthogonal:512", "permutation:3", "permutation:6",
                                 "permutation:9", "gaussian:9:10:1", "gaussian:9:300:1"}) {
            const SchemeSpec s = parse_scheme(text);
            out.push_back({text, pairwise_terms(s.spectrum()), s.signal_count()});
        }
        return out;
    }();
    return schemes;
}

const std::vector<GridChannel>& grid_channels() {
    static const std::vector<GridChannel> channels = [] {
        std::vector<GridChannel> out;
        for (std::size_t n : {1u, 2u, 4u}) {
            for (double rho : {0.1, 0.5}) {
                out.push_back({"N=" + std::to_string(n) + " rho=" + fmt("%g", rho), n, rho,
                               build_rayleigh(exponential_correlation(n, rho))});
            }
        }
        return out;
    }();
    return channels;
}

bool same_channel(const RayleighChannel& a, const RayleighChannel& b) {
    return a.eigenvalues() == b.eigenvalues() && a.coeffs() == b.coeffs();
}

std::vector<double> grid_snr_db() {
    std::vector<double> v;
    for (int db = 0; db <= 30; ++db) v.push_back(db);
    return v;
}

// ---------------------------------------------------------------------------

Outcome criterion_1() {
    Outcome o;
    std::size_t points = 0;
    double worst_excess = -std::numeric_limits<double>::infinity();
    std::string first_failure;
    for (const auto& s : grid_schemes()) {
        for (const auto& c : grid_channels()) {
            for (double db : grid_snr_db()) {
                const LinkParams link = LinkParams::from_db(db);
                const double ub = union_bound(s.terms, link, c.ch);
                const double g0 = objective_G(s.terms, link, c.ch, 0.0);
                const NewBound nb = new_bound(s.terms, link, c.ch);
                const double excess = nb.value - std::min(ub, 1.0);
                worst_excess = std::max(worst_excess, excess);
                ++points;
                if (excess > 1e-12 || g0 != ub) {
                    o.pass = false;
                    if (first_failure.empty()) {
                        first_failure = s.name + " " + c.name + " " + fmt("%g dB", db);
                    }
                }
            }
        }
    }
    o.detail = std::to_string(points) + " points, max(new - min(union,1)) = " + fmt("%.3g", worst_excess) +
               ", G(0) == union bound at every point";
    if (!o.pass) o.detail += "; first failure at " + first_failure;
    return o;
}

struct GapCheck {
    double gap = 0.0;
    double level = 0.0;
};

GapCheck preset_gap(const PresetReport& r, const std::string& label) {
    const auto& c = r.find(label);
    if (!c.gap) fail_numeric("no gap for " + label);
    return {c.gap->gap_db, c.gap->level};
}

PresetReport bounds_preset(const std::string& name) {
    PresetOptions opts;
    opts.mc = false;
    opts.threads = resolve_threads(0);
    return run_preset(name, "", opts);
}

std::string describe(const std::string& label, const GapCheck& g) {
    return label + " " + fmt("%.3f dB", g.gap) + " at " + fmt("%g", g.level);
}

Outcome criterion_2() {
    const PresetReport r = bounds_preset("fig1");
    const GapCheck m16 = preset_gap(r, "orthogonal_M16");
    const GapCheck m512 = preset_gap(r, "orthogonal_M512");
    Outcome o;
    o.pass = m16.level == 1e-4 && m512.level == 1e-4 && std::fabs(m16.gap - 0.5) <= 0.3 &&
             std::fabs(m512.gap - 4.4) <= 0.5;
    o.detail = describe("M=16", m16) + " (want 0.5 +- 0.3); " + describe("M=512", m512) + " (want 4.4 +- 0.5)";
    return o;
}

std::map<std::string, PresetReport>& preset_cache() {
    static std::map<std::string, PresetReport> cache;
    return cache;
}

const PresetReport& cached_preset(const std::string& name) {
    auto& cache = preset_cache();
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, bounds_preset(name)).first;
    return it->second;
}

Outcome criterion_3() {
    const PresetReport& r = cached_preset("fig2");
    const GapCheck m16 = preset_gap(r, "orthogonal_M16");
    const GapCheck m512 = preset_gap(r, "orthogonal_M512");
    Outcome o;
    o.pass = m16.level == 1e-4 && m512.level == 1e-4 && m16.gap <= 0.3 && std::fabs(m512.gap - 1.0) <= 0.5;
    o.detail = describe("M=16", m16) + " (want <= 0.3); " + describe("M=512", m512) + " (want 1.0 +- 0.5)";
    return o;
}

Outcome criterion_4() {
    const PresetReport& fig2 = cached_preset("fig2");
    const PresetReport& fig3 = cached_preset("fig3");
    Outcome o;
    for (const char* label : {"orthogonal_M16", "orthogonal_M512"}) {
        const GapCheck a = preset_gap(fig2, label);
        const GapCheck b = preset_gap(fig3, label);
        const double diff = std::fabs(a.gap - b.gap);
        o.pass = o.pass && a.level == b.level && diff < 0.3;
        o.detail += std::string(o.detail.empty() ? "" : "; ") + label + ": rho=0.1 " + fmt("%.3f", a.gap) +
                    " vs rho=0.5 " + fmt("%.3f", b.gap) + " dB, diff " + fmt("%.3f", diff);
    }
    return o;
}

Outcome criterion_5() {
    const RayleighChannel ch = build_rayleigh(exponential_correlation(2, 0.1));
    const PairwiseTerms l9 = pairwise_terms(analytic_spectrum_permutation(9));
    const double ub28 = union_bound(l9, LinkParams::from_db(28.0), ch);
    const PresetReport r = bounds_preset("fig4");
    double max_nb = 0.0;
    for (const auto& row : r.find("permutation_L9").result.rows) max_nb = std::max(max_nb, *row.new_bound);
    const GapCheck g3 = preset_gap(r, "permutation_L3");
    const GapCheck g9 = preset_gap(r, "permutation_L9");
    const bool a = ub28 > 1.0;
    const bool b = max_nb < 1.0;
    const bool c = g3.gap <= 0.5;
    const bool d = std::fabs(g9.gap - 15.0) <= 2.0;
    Outcome o;
    o.pass = a && b && c && d;
    o.detail = std::string(a ? "" : "[fails] ") + "union(L=9, 28 dB) = " + fmt("%.4f", ub28) + " (want > 1); " +
               (b ? "" : "[fails] ") + "max new(L=9) = " + fmt("%.12f", max_nb) + " (want < 1); " +
               (c ? "" : "[fails] ") + describe("L=3", g3) + " (want <= 0.5); " + (d ? "" : "[fails] ") +
               describe("L=9", g9) + " (want 15 +- 2)";
    return o;
}

Outcome criterion_6() {
    const PresetReport& r = cached_preset("fig5");
    Outcome o;
    double sum10 = 0.0, sum300 = 0.0;
    std::string per_seed;
    for (int seed = 1; seed <= 5; ++seed) {
        const GapCheck a = preset_gap(r, "gaussian_M10_seed" + std::to_string(seed));
        const GapCheck b = preset_gap(r, "gaussian_M300_seed" + std::to_string(seed));
        sum10 += a.gap;
        sum300 += b.gap;
        o.pass = o.pass && a.level == 1e-4 && b.level == 1e-4 && b.gap > a.gap;
        per_seed += " s" + std::to_string(seed) + ":" + fmt("%.2f", a.gap) + "/" + fmt("%.2f", b.gap);
    }
    const double mean10 = sum10 / 5.0, mean300 = sum300 / 5.0;
    o.pass = o.pass && mean10 <= 1.0 && mean300 >= 2.0 && mean300 <= 5.0;
    o.detail = "mean gap M=10 " + fmt("%.3f", mean10) + " dB (want <= 1), M=300 " + fmt("%.3f", mean300) +
               " dB (want 2..5); per seed M10/M300:" + per_seed;
    return o;
}

Outcome criterion_7() {
    const RayleighChannel ch = build_rayleigh(exponential_correlation(2, 0.1));
    const unsigned threads = resolve_threads(0);
    struct Case {
        SchemeSpec scheme;
        std::vector<double> dbs;
    };
    Outcome o;
    for (const Case& c : {Case{SchemeSpec::orthogonal(16), {5, 10, 15}}, Case{SchemeSpec::permutation(3), {5, 10}}}) {
        const Constellation con = c.scheme.constellation();
        const PairwiseTerms terms = pairwise_terms(c.scheme.spectrum());
        for (double db : c.dbs) {
            const LinkParams link = LinkParams::from_db(db);
            const McEstimate est = mc_bler(con, ch, link, 200000, 2024, 0, threads);
            const double nb = new_bound(terms, link, ch).value;
            const bool ok = est.ci_low <= nb;
            o.pass = o.pass && ok;
            o.detail += std::string(o.detail.empty() ? "" : "; ") + c.scheme.text() + " " + fmt("%g dB", db) +
                        ": ci_low " + fmt("%.4g", est.ci_low) + " <= new " + fmt("%.4g", nb) + (ok ? "" : " [fails]");
        }
    }
    return o;
}

Outcome criterion_8() {
    Outcome o;
    double worst = 0.0;
    int count = 0, underflow = 0;
    for (std::size_t n : {1u, 2u, 4u}) {
        const RayleighChannel ch = build_rayleigh(exponential_correlation(n, 0.1));
        for (double d : {0.2, std::sqrt(2.0), 2.0}) {
            for (double snr : {0.1, 1.0, 10.0, 100.0}) {
                for (double gamma : {0.0, 0.1, 1.0, 10.0}) {
                    ++count;
                    const long double want = oracle::pep_tail_direct(d, snr, ch, gamma);
                    const double got = pep_tail(d, LinkParams(snr), ch, gamma);
                    if (want < std::numeric_limits<double>::min()) {
                        // below the smallest normal double: only require underflow
                        ++underflow;
                        if (got >= std::numeric_limits<double>::min()) o.pass = false;
                        continue;
                    }
                    const double rel = static_cast<double>(std::fabs((got - want) / want));
                    worst = std::max(worst, rel);
                    if (!(rel < 1e-8)) o.pass = false;
                }
            }
        }
    }
    o.detail = std::to_string(count) + " points, max rel err " + fmt("%.3g", worst) + " (want < 1e-8)";
    if (underflow) o.detail += ", " + std::to_string(underflow) + " below double range (both underflow)";
    return o;
}

Outcome criterion_9() {
    Outcome o;
    const RayleighChannel ch = build_rayleigh(exponential_correlation(1, 0.0));
    double worst = 0.0;
    for (double d : {0.5, std::sqrt(2.0), 2.0}) {
        for (double snr : {0.1, 1.0, 10.0}) {
            const double want = oracle::rayleigh_pep(d, snr);
            const double rel = std::fabs(pep_tail(d, LinkParams(snr), ch, 0.0) - want) / want;
            worst = std::max(worst, rel);
        }
    }
    o.pass = worst < 1e-10;
    o.detail = "9 points, max rel err " + fmt("%.3g", worst) + " (want < 1e-10)";
    return o;
}

/// Relative accuracy to which a minimiser of G evaluated with relative
/// noise 1e-16 can place the minimum: sqrt(1e-16 / kappa), where
/// kappa = G''(g) g^2 / G(g) and G'' = f_X h' at the stationary point.
double long_double_resolution(const PairwiseTerms& terms, const LinkParams& link, const RayleighChannel& ch,
                              double g) {
    long double dh = 0.0L;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        const long double c = static_cast<long double>(terms.squared_distance[k]) * link.snr / 2.0L;
        const long double x = std::sqrt(c * g);
        dh += terms.weight[k] * std::exp(-x * x / 2.0L) / std::sqrt(2.0L * std::acos(-1.0L)) * std::sqrt(c) /
              (2.0L * std::sqrt(static_cast<long double>(g)));
    }
    const long double kappa = ch.pdf_ld(g) * dh * g * g / objective_g_ld(terms, link, ch, g);
    return kappa > 0.0L ? static_cast<double>(std::sqrt(1e-16L / kappa)) : 1.0;
}

Outcome criterion_10() {
    Outcome o;
    std::size_t configs = 0, skipped = 0, refined = 0;
    double worst_h = 0.0, worst_gs = 0.0, worst_second = std::numeric_limits<double>::infinity();
    int worst_changes = 1;
    std::string first_failure;
    const auto& channels = grid_channels();
    for (const auto& s : grid_schemes()) {
        if (s.m < 3) continue;
        for (std::size_t ci = 0; ci < channels.size(); ++ci) {
            bool duplicate = false;
            for (std::size_t e = 0; e < ci; ++e) duplicate = duplicate || same_channel(channels[e].ch, channels[ci].ch);
            if (duplicate) {
                skipped += grid_snr_db().size();
                continue;
            }
            const RayleighChannel& ch = channels[ci].ch;
            for (double db : grid_snr_db()) {
                ++configs;
                const LinkParams link = LinkParams::from_db(db);
                const ObjectiveScan scan = scan_objective(s.terms, link, ch, 1e-5, 1e4, 200);
                const double gs = find_gamma_star(s.terms, link);
                const double h = stationarity_h(s.terms, link, gs);

                // independent golden-section minimisation of G over [0, 1e3],
                // refined in quad precision when long double cannot resolve
                // the minimum to 1e-8
                double golden = oracle::golden_section(
                    [&](double g) { return objective_g_ld(s.terms, link, ch, g); }, 0.0, 1e3, 1e-9);
                if (long_double_resolution(s.terms, link, ch, gs) > 1e-8) {
                    ++refined;
                    const oracle::QuadObjective quad_g(s.terms, link.snr, ch);
                    golden = oracle::golden_section(quad_g, golden * (1.0 - 1e-3), golden * (1.0 + 1e-3), 1e-9);
                }
                const double rel = std::fabs(golden - gs) / gs;

                const double delta = 1e-3 * gs;
                const long double second = objective_g_ld(s.terms, link, ch, gs + delta) -
                                           2.0L * objective_g_ld(s.terms, link, ch, gs) +
                                           objective_g_ld(s.terms, link, ch, gs - delta);

                worst_h = std::max(worst_h, std::fabs(h));
                worst_gs = std::max(worst_gs, rel);
                worst_second = std::min(worst_second, static_cast<double>(second));
                if (scan.sign_changes != 1) worst_changes = std::max(worst_changes, scan.sign_changes);
                const bool ok = scan.sign_changes == 1 && std::fabs(h) < 1e-9 && second >= -1e-8L && rel <= 1e-6;
                if (!ok) {
                    o.pass = false;
                    if (first_failure.empty()) {
                        first_failure = s.name + " " + channels[ci].name + " " + fmt("%g dB", db) + " (changes " +
                                        std::to_string(scan.sign_changes) + ", h " + fmt("%.3g", h) + ", rel " +
                                        fmt("%.3g", rel) + ")";
                    }
                }
            }
        }
    }
    o.detail = std::to_string(configs) + " configs (" + std::to_string(skipped) +
               " skipped as exact duplicates: rho has no effect at N=1); slope sign changes " +
               (o.pass ? "1 everywhere" : "up to " + std::to_string(worst_changes)) + ", max |h(gamma*)| " +
               fmt("%.3g", worst_h) + ", min second difference " + fmt("%.3g", worst_second) +
               ", max golden-section rel diff " + fmt("%.3g", worst_gs) + " (" + std::to_string(refined) +
               " refined in quad precision)";
    if (!o.pass) o.detail += "; first failure " + first_failure;
    return o;
}

Outcome criterion_11() {
    Outcome o;
    std::vector<std::string> notes;
    for (std::size_t m : {4u, 16u}) {
        if (!equivalent(analytic_spectrum_orthogonal(m), distance_spectrum(gen_orthogonal(m)))) {
            o.pass = false;
            notes.push_back("orthogonal M=" + std::to_string(m) + " differs");
        }
    }
    for (unsigned l : {3u, 4u, 5u}) {
        if (!equivalent(analytic_spectrum_permutation(l), distance_spectrum(gen_permutation(l)))) {
            o.pass = false;
            notes.push_back("permutation L=" + std::to_string(l) + " differs");
        }
    }
    for (unsigned l = 3; l <= 7; ++l) {
        std::uint64_t total = 0, fact = 1;
        for (unsigned k = 2; k <= l; ++k) {
            total += derangements(k) * binomial(l, k);
            fact *= k;
        }
        if (total != fact - 1) {
            o.pass = false;
            notes.push_back("sum for L=" + std::to_string(l));
        }
    }
    for (unsigned n = 1; n <= 18; ++n) {
        const long double f = std::floor(std::tgamma(n + 1.0L) / std::exp(1.0L) + 0.5L);
        if (derangements(n) != static_cast<std::uint64_t>(f)) {
            o.pass = false;
            notes.push_back("floor formula n=" + std::to_string(n));
        }
    }
    o.detail = o.pass ? "analytic == brute force for orthogonal M in {4,16} and permutation L in {3,4,5}; "
                        "sum !m C(L,m) = L!-1 for L=3..7; floor formula holds for n=1..18"
                      : "mismatch:";
    for (const auto& n : notes) o.detail += " " + n;
    return o;
}

Outcome criterion_12() {
    const auto r = exponential_correlation(2, 0.1);
    const RayleighChannel ch = build_rayleigh(r);
    Xoshiro256 rng(20240601);
    ComplexMatrix cov = ComplexMatrix::Zero(2, 2);
    std::vector<double> gains;
    const int samples = 100000;
    gains.reserve(samples);
    for (int i = 0; i < samples; ++i) {
        const ComplexVector h = sample_fading(ch, rng);
        cov += h * h.adjoint();
        gains.push_back(h.squaredNorm());
    }
    cov /= samples;
    const double frob = (cov - r.entries()).norm();
    const double ks = oracle::ks_distance(gains, [&](double x) { return gain_cdf(ch, x); });
    Outcome o;
    o.pass = frob < 0.05 && ks < 0.01;
    o.detail = "Frobenius distance " + fmt("%.4f", frob) + " (want < 0.05), KS " + fmt("%.4f", ks) + " (want < 0.01)";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::map<int, std::function<Outcome()>> criteria = {
        {1, criterion_1}, {2, criterion_2},   {3, criterion_3},   {4, criterion_4},
        {5, criterion_5}, {6, criterion_6},   {7, criterion_7},   {8, criterion_8},
        {9, criterion_9}, {10, criterion_10}, {11, criterion_11}, {12, criterion_12}};
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    int failures = 0;
    for (const auto& [id, run] : criteria) {
        if (!selected.empty() && !selected.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("CRITERION %d %s (%.1f s): %s\n", id, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
