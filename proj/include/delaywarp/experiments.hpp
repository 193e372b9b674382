#pragma once

// Drivers behind the command-line tool: each takes a RunConfig, runs one
// experiment and returns plain result structs plus JSON/CSV writers.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "delaywarp/abel.hpp"
#include "delaywarp/config.hpp"
#include "delaywarp/dde.hpp"
#include "delaywarp/perturbation.hpp"
#include "delaywarp/random.hpp"
#include "delaywarp/robust.hpp"
#include "delaywarp/time_transform.hpp"

namespace delaywarp {

/// Worker count for sweeps: DELAYWARP_THREADS if set, else hardware concurrency.
inline unsigned sweep_threads() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("DELAYWARP_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) n = std::min<unsigned>(n, static_cast<unsigned>(v));
    }
    return n;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers (strided split).
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += threads) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

inline void require_hypotheses(const PeriodicDelay& delay) {
    const auto rep = validate_hypotheses(delay);
    if (rep.ok()) return;
    std::string failed;
    for (const auto& c : rep.checks) {
        if (!c.passed && c.fatal) failed += (failed.empty() ? "" : ", ") + c.name;
    }
    if (!rep.at("non_resonance").passed) throw ResonanceError("delay hypotheses failed: " + failed);
    throw ConstraintError("delay hypotheses failed: " + failed);
}

inline nlohmann::json to_json(const HypothesisReport& rep) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : rep.checks) {
        nlohmann::json j = {{"name", c.name},   {"passed", c.passed},       {"fatal", c.fatal},
                            {"method", c.method}, {"value", c.value}, {"threshold", c.threshold}};
        if (!c.warning.empty()) j["warning"] = c.warning;
        checks.push_back(j);
    }
    return {{"ok", rep.ok()},
            {"checks", checks},
            {"resonance_residue", rep.resonance_residue},
            {"resonance_margin", rep.resonance_margin}};
}

inline AbelOptions abel_options(const RunConfig& cfg) {
    AbelOptions o;
    o.root_tol = cfg.root_tol;
    o.samples_per_interval = cfg.samples_per_interval;
    return o;
}

inline std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

inline nlohmann::json delay_json(const RunConfig& cfg) {
    nlohmann::json j = {{"tau0", cfg.delay.tau0}, {"eps", cfg.delay.eps}, {"omega", cfg.delay.omega},
                        {"kind", cfg.delay.kind}, {"tau_star", cfg.resolved_tau_star()}};
    if (!cfg.preset.empty()) j["preset"] = cfg.preset;
    return j;
}

// ---- approx -----------------------------------------------------------------

struct ApproxResult {
    std::vector<double> lambda, order1, order2, exact;
    double spread_12 = 0.0, spread_1e = 0.0, spread_2e = 0.0;
    double exact_residual_sup = 0.0;
    HypothesisReport hypotheses;

    [[nodiscard]] double max_spread() const { return std::max({spread_12, spread_1e, spread_2e}); }
};

inline ApproxResult run_approx(const RunConfig& cfg, std::size_t points = 1201) {
    const PeriodicDelay delay = cfg.delay.build();
    ApproxResult r;
    r.hypotheses = validate_hypotheses(delay);
    require_hypotheses(delay);
    const double ts = cfg.resolved_tau_star();
    const auto o1 = SeriesTransform::build(delay, ts, 1);
    const auto o2 = SeriesTransform::build(delay, ts, 2);
    const double horizon = std::max(cfg.window_end, cfg.horizon.value_or(cfg.window_end));
    const auto ex = build_exact_transform(delay, ts, horizon, abel_options(cfg));

    r.lambda = linspace(cfg.window_start, cfg.window_end, points);
    for (double l : r.lambda) {
        r.order1.push_back(o1.h_dot(l));
        r.order2.push_back(o2.h_dot(l));
        r.exact.push_back(ex.h_dot(l));
        r.spread_12 = std::max(r.spread_12, std::abs(r.order1.back() - r.order2.back()));
        r.spread_1e = std::max(r.spread_1e, std::abs(r.order1.back() - r.exact.back()));
        r.spread_2e = std::max(r.spread_2e, std::abs(r.order2.back() - r.exact.back()));
    }
    const auto pts = uniform_points(cfg.seed, 1000, 0.0, ex.horizon());
    r.exact_residual_sup = abel_residual(ex, delay, ts, pts).sup;
    return r;
}

inline void write_approx(const RunConfig& cfg, const ApproxResult& r) {
    std::string csv = "lambda,hdot_order1,hdot_order2,hdot_exact\n";
    for (std::size_t i = 0; i < r.lambda.size(); ++i) {
        csv += format17(r.lambda[i]) + "," + format17(r.order1[i]) + "," + format17(r.order2[i]) + "," +
               format17(r.exact[i]) + "\n";
    }
    const std::filesystem::path out(cfg.out_dir);
    write_text(out / "hdot_curves.csv", csv);
    write_json(out / "approx_summary.json",
               {{"command", "approx"},
                {"delay", delay_json(cfg)},
                {"window", {cfg.window_start, cfg.window_end}},
                {"spread",
                 {{"order1_order2", r.spread_12},
                  {"order1_exact", r.spread_1e},
                  {"order2_exact", r.spread_2e},
                  {"max", r.max_spread()}}},
                {"exact_abel_residual_sup", r.exact_residual_sup},
                {"rng", {{"generator", "splitmix64"}, {"seed", cfg.seed}, {"points", 1000}}},
                {"hypotheses", to_json(r.hypotheses)}});
}

// ---- error sweep --------------------------------------------------------------

struct SweepResult {
    std::vector<double> eps, e_order1, e_order2;
    double slope_order1 = 0.0, slope_order2 = 0.0;
    bool monotone = true;   // both errors decrease strictly as eps decreases
};

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// e = |h'(0)(1 - tau'(0)) - h'(-tau*)| for both orders over the eps grid.
/// Only the expansion coefficients are needed, so the delay hypotheses other
/// than non-resonance are not enforced here.
inline SweepResult run_error_sweep(const RunConfig& cfg) {
    SweepResult r;
    r.eps = cfg.eps_grid.empty() ? default_eps_grid() : cfg.eps_grid;
    std::sort(r.eps.begin(), r.eps.end());
    r.eps.erase(std::unique(r.eps.begin(), r.eps.end()), r.eps.end());
    if (r.eps.size() < 2) throw ConfigError("error sweep needs at least two eps values");
    r.e_order1.resize(r.eps.size());
    r.e_order2.resize(r.eps.size());
    const double ts = cfg.resolved_tau_star();
    parallel_for(r.eps.size(), sweep_threads(), [&](std::size_t i) {
        DelayProfile p = cfg.delay;
        p.eps = r.eps[i];
        const PeriodicDelay d = p.build();
        r.e_order1[i] = seed_compatibility_error(SeriesTransform::build(d, ts, 1), d);
        r.e_order2[i] = seed_compatibility_error(SeriesTransform::build(d, ts, 2), d);
    });
    r.slope_order1 = loglog_slope(r.eps, r.e_order1);
    r.slope_order2 = loglog_slope(r.eps, r.e_order2);
    for (std::size_t i = 1; i < r.eps.size(); ++i) {
        r.monotone = r.monotone && r.e_order1[i] > r.e_order1[i - 1] && r.e_order2[i] > r.e_order2[i - 1];
    }
    return r;
}

inline void write_error_sweep(const RunConfig& cfg, const SweepResult& r) {
    std::string csv = "eps,e_order1,e_order2\n";
    for (std::size_t i = 0; i < r.eps.size(); ++i) {
        csv += format17(r.eps[i]) + "," + format17(r.e_order1[i]) + "," + format17(r.e_order2[i]) + "\n";
    }
    const std::filesystem::path out(cfg.out_dir);
    write_text(out / "error_sweep.csv", csv);
    write_json(out / "error_sweep_summary.json",
               {{"command", "error-sweep"},
                {"delay", delay_json(cfg)},
                {"slope_order1", r.slope_order1},
                {"slope_order2", r.slope_order2},
                {"monotone", r.monotone},
                {"points", r.eps.size()}});
}

// ---- equivalence ----------------------------------------------------------------

struct EquivalenceResult {
    EquivalenceReport report;
    std::string transform;
    double step = 0.0;
};

inline double resolved_step(const RunConfig& cfg, const PeriodicDelay& delay) {
    return cfg.step.value_or(std::min(min_delay(delay), cfg.resolved_tau_star()) / 100.0);
}

inline EquivalenceResult run_equivalence(const RunConfig& cfg) {
    const PeriodicDelay delay = cfg.delay.build();
    require_hypotheses(delay);
    const double ts = cfg.resolved_tau_star();
    const DdeSystem sys(cfg.A0, cfg.A1);
    EquivalenceResult r;
    r.step = resolved_step(cfg, delay);
    const std::string order = cfg.order.empty() ? "exact" : cfg.order;
    r.transform = order;
    if (order == "exact") {
        const double horizon = std::max(cfg.t_end, cfg.horizon.value_or(cfg.t_end));
        const auto ex = build_exact_transform(delay, ts, horizon, abel_options(cfg));
        r.report = verify_equivalence(sys, delay, ex, cfg.t_end, r.step);
    } else {
        const auto tt = SeriesTransform::build(delay, ts, order == "1" ? 1 : 2);
        r.report = verify_equivalence(sys, delay, tt, cfg.t_end, r.step);
    }
    return r;
}

inline void write_equivalence(const RunConfig& cfg, const EquivalenceResult& r) {
    write_json(std::filesystem::path(cfg.out_dir) / "equivalence.json",
               {{"command", "equivalence"},
                {"delay", delay_json(cfg)},
                {"transform", r.transform},
                {"t_end", cfg.t_end},
                {"step", r.step},
                {"sup_diff", r.report.sup},
                {"rms_diff", r.report.rms},
                {"state_scale", r.report.scale},
                {"points", r.report.points}});
}

// ---- probe ----------------------------------------------------------------------

/// Probes the original system, or the transformed one when an order is set.
inline ProbeResult run_probe(const RunConfig& cfg) {
    const PeriodicDelay delay = cfg.delay.build();
    require_hypotheses(delay);
    ProbeOptions po;
    if (cfg.step) po.step = *cfg.step;
    const double ts = cfg.resolved_tau_star();
    if (cfg.order.empty()) return stability_probe(cfg.A0, cfg.A1, delay, cfg.probe_t_end, po);
    if (cfg.order == "exact") {
        const auto ex = build_exact_transform(delay, ts, cfg.probe_t_end, abel_options(cfg));
        return stability_probe(cfg.A0, cfg.A1, ex, ts, cfg.probe_t_end, po);
    }
    const auto tt = SeriesTransform::build(delay, ts, cfg.order == "1" ? 1 : 2);
    return stability_probe(cfg.A0, cfg.A1, tt, ts, cfg.probe_t_end, po);
}

inline nlohmann::json to_json(const ProbeResult& p) {
    return {{"verdict", to_string(p.verdict)}, {"early_sup", p.early_sup}, {"late_sup", p.late_sup},
            {"ratio", p.ratio},                {"t_end", p.t_end},         {"step", p.step},
            {"diverged", p.diverged}};
}

inline void write_probe(const RunConfig& cfg, const ProbeResult& p) {
    nlohmann::json j = to_json(p);
    j["command"] = "probe";
    j["delay"] = delay_json(cfg);
    j["system"] = cfg.order.empty() ? "original" : "transformed-" + cfg.order;
    write_json(std::filesystem::path(cfg.out_dir) / "probe.json", j);
}

// ---- PIE export -------------------------------------------------------------------

/// Bounds of h' for the configured transform (second order by default), then
/// the PIE operator data of the nominal system plus the feedback record.
inline nlohmann::json run_pie_export(const RunConfig& cfg) {
    const PeriodicDelay delay = cfg.delay.build();
    require_hypotheses(delay);
    const double ts = cfg.resolved_tau_star();
    const std::string order = cfg.order.empty() ? "2" : cfg.order;
    HdotBounds bounds;
    if (order == "exact") {
        const double horizon = std::max(cfg.t_end, cfg.horizon.value_or(cfg.t_end));
        const auto ex = build_exact_transform(delay, ts, horizon, abel_options(cfg));
        bounds = compute_hdot_bounds(ex, 0.0, ex.horizon());
    } else {
        const auto tt = SeriesTransform::build(delay, ts, order == "1" ? 1 : 2);
        bounds = compute_hdot_bounds(tt, 0.0, tt.period());
    }
    nlohmann::json j = to_json(assemble_pie(cfg.A0, cfg.A1, bounds, ts));
    j["bounds"] = to_json(bounds);
    j["feedback"] = to_json(assemble_feedback_form(cfg.A0, cfg.A1, bounds, ts));
    j["transform"] = order;
    return j;
}

} // namespace delaywarp
