// delaywarp: command-line front end.
//
//   delaywarp approx       --preset fig1 --out out/
//   delaywarp error-sweep  --preset fig3 --out out/
//   delaywarp equivalence  --preset gu-example --order exact
//   delaywarp probe        --preset gu-example
//   delaywarp pie-export   --preset gu-example
//
// Exit codes: 0 success, 2 config, 3 hypothesis/resonance/domain, 4 numerical, 1 other.
// Failures also print {"error": {"code", "message"}} on stderr.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "delaywarp/experiments.hpp"

namespace {

using namespace delaywarp;

struct Flags {
    std::string config;
    std::string preset;
    std::string order;
    std::optional<double> eps, tau0, omega, tau_star, horizon, step, t_end;
    std::string out = ".";
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--preset", f.preset, "fig1 | fig2 | fig3 | gu-example");
    cmd->add_option("--order", f.order, "1 | 2 | exact")->check(CLI::IsMember({"1", "2", "exact"}));
    cmd->add_option("--eps", f.eps, "perturbation amplitude");
    cmd->add_option("--tau0", f.tau0, "mean delay");
    cmd->add_option("--omega", f.omega, "angular frequency");
    cmd->add_option("--tau-star", f.tau_star, "constant delay of the transformed system");
    cmd->add_option("--horizon", f.horizon, "propagation horizon");
    cmd->add_option("--step", f.step, "integration step");
    cmd->add_option("--t-end", f.t_end, "simulation end time");
    cmd->add_option("--out", f.out, "output directory");
}

RunConfig resolve(const Flags& f) {
    RunConfig c = f.preset.empty() ? default_config() : preset_config(f.preset);
    if (!f.config.empty()) apply_config_json(c, read_json_file(f.config));
    if (f.eps) c.delay.eps = *f.eps;
    if (f.tau0) c.delay.tau0 = *f.tau0;
    if (f.omega) c.delay.omega = *f.omega;
    if (f.tau_star) c.tau_star = *f.tau_star;
    if (f.horizon) c.horizon = *f.horizon;
    if (f.step) c.step = *f.step;
    if (f.t_end) {
        c.t_end = *f.t_end;
        c.probe_t_end = *f.t_end;
    }
    if (!f.order.empty()) c.order = f.order;
    c.out_dir = f.out;
    validate_config(c);
    return c;
}

int fail(const std::string& code, const std::string& message, int exit_code) {
    std::cerr << nlohmann::json{{"error", {{"code", code}, {"message", message}}}}.dump() << '\n';
    return exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-transformations for linear DDEs with periodic delay"};
    app.require_subcommand(1);
    Flags f;
    auto* approx = app.add_subcommand("approx", "h' curves: first order, second order, propagated");
    auto* sweep = app.add_subcommand("error-sweep", "seed-compatibility error versus eps");
    auto* equiv = app.add_subcommand("equivalence", "simulate original and transformed systems and compare");
    auto* probe = app.add_subcommand("probe", "simulation-based stability probe");
    auto* pie = app.add_subcommand("pie-export", "PIE operator data and feedback bounds as JSON");
    for (auto* cmd : {approx, sweep, equiv, probe, pie}) add_common(cmd, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return fail("usage", e.what(), 2);
    }

    try {
        const RunConfig cfg = resolve(f);
        nlohmann::json summary;
        if (approx->parsed()) {
            const auto r = run_approx(cfg);
            write_approx(cfg, r);
            summary = {{"spread_max", r.max_spread()}, {"exact_abel_residual_sup", r.exact_residual_sup}};
        } else if (sweep->parsed()) {
            const auto r = run_error_sweep(cfg);
            write_error_sweep(cfg, r);
            summary = {{"slope_order1", r.slope_order1}, {"slope_order2", r.slope_order2}};
        } else if (equiv->parsed()) {
            const auto r = run_equivalence(cfg);
            write_equivalence(cfg, r);
            summary = {{"sup_diff", r.report.sup}, {"transform", r.transform}};
        } else if (probe->parsed()) {
            const auto r = run_probe(cfg);
            write_probe(cfg, r);
            summary = {{"verdict", to_string(r.verdict)}, {"ratio", r.ratio}};
        } else if (pie->parsed()) {
            const auto j = run_pie_export(cfg);
            write_json(std::filesystem::path(cfg.out_dir) / "pie.json", j);
            summary = {{"h_bar", j["h_bar"]}, {"gamma", j["gamma"]}};
        }
        std::cout << summary.dump() << '\n';
        return 0;
    } catch (const ConfigError& e) {
        return fail(e.code(), e.what(), 2);
    } catch (const NumericalError& e) {
        return fail(e.code(), e.what(), 4);
    } catch (const Error& e) {
        return fail(e.code(), e.what(), 3);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 1);
    }
}
