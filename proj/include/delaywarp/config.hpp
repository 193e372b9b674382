#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "delaywarp/error.hpp"
#include "delaywarp/fourier.hpp"
#include "delaywarp/periodic_delay.hpp"

namespace delaywarp {

/// Delay profile as read from a config file. Either `kind = "sin"` or an
/// explicit list of (k, re, im) triples; a triple for k also fixes -k by
/// conjugation unless -k is listed explicitly.
struct DelayProfile {
    double tau0 = 3.0;
    double eps = 0.01;
    double omega = 5.0;
    std::string kind = "sin";
    std::vector<std::tuple<int, double, double>> coefficients;

    [[nodiscard]] PeriodicDelay build() const {
        if (kind == "sin") return PeriodicDelay::sinusoid(tau0, omega, eps);
        if (kind != "fourier") throw ConfigError("unknown delay kind '" + kind + "'");
        if (coefficients.empty()) throw ConfigError("fourier delay needs at least one coefficient");
        int K = 0;
        for (const auto& [k, re, im] : coefficients) K = std::max(K, std::abs(k));
        FourierSeries s(omega, K);
        std::map<int, bool> given;
        for (const auto& [k, re, im] : coefficients) {
            s[k] = Complex(re, im);
            given[k] = true;
        }
        for (const auto& [k, re, im] : coefficients) {
            if (!given.count(-k)) s[-k] = Complex(re, -im);
        }
        return {tau0, eps, s};
    }
};

inline DelayProfile delay_profile_from_json(const nlohmann::json& j) {
    DelayProfile p;
    p.tau0 = j.value("tau0", p.tau0);
    p.eps = j.value("eps", p.eps);
    p.omega = j.value("omega", p.omega);
    if (j.contains("coefficients")) {
        p.kind = "fourier";
        for (const auto& t : j.at("coefficients")) {
            if (!t.is_array() || t.size() != 3) throw ConfigError("coefficients must be [k, re, im] triples");
            p.coefficients.emplace_back(t[0].get<int>(), t[1].get<double>(), t[2].get<double>());
        }
    }
    if (j.contains("kind")) p.kind = j.at("kind").get<std::string>();
    return p;
}

/// Everything a CLI command needs. Unset optionals fall back to defaults
/// derived from the delay (tau_star = tau0, step = tau_min / 100, ...).
struct RunConfig {
    std::string preset;
    DelayProfile delay;
    std::optional<double> tau_star;
    std::string order;                    // "1", "2", "exact" or empty for the command default
    double window_start = 0.0;
    double window_end = 3.0;
    std::optional<double> step;
    std::optional<double> horizon;
    double t_end = 30.0;
    double probe_t_end = 200.0;
    double root_tol = 1e-12;
    int samples_per_interval = 800;
    std::vector<double> eps_grid;
    std::uint64_t seed = 20240917;
    Eigen::MatrixXd A0;
    Eigen::MatrixXd A1;
    std::string out_dir = ".";

    [[nodiscard]] double resolved_tau_star() const { return tau_star.value_or(delay.tau0); }
};

inline Eigen::MatrixXd gu_A0() {
    Eigen::MatrixXd m(2, 2);
    m << -2.0, 0.0, 0.0, -0.9;
    return m;
}

inline Eigen::MatrixXd gu_A1() {
    Eigen::MatrixXd m(2, 2);
    m << -1.0, 0.0, -1.0, -1.0;
    return m;
}

/// 16 log-spaced amplitudes in [1e-3, 0.19].
inline std::vector<double> default_eps_grid() {
    std::vector<double> g(16);
    for (int i = 0; i < 16; ++i) g[i] = 1e-3 * std::pow(190.0, i / 15.0);
    return g;
}

inline RunConfig default_config() {
    RunConfig c;
    c.A0 = gu_A0();
    c.A1 = gu_A1();
    c.eps_grid = default_eps_grid();
    return c;
}

/// Built-in parameter sets: fig1 (eps = 0.01), fig2 (eps = 0.1), fig3 (error
/// sweep) and gu-example (two-state benchmark, eps = 0.01). All use
/// tau* = tau0 = 3 and omega = 5.
inline RunConfig preset_config(const std::string& name) {
    RunConfig c = default_config();
    c.preset = name;
    if (name == "fig1") {
        c.delay.eps = 0.01;
    } else if (name == "fig2") {
        c.delay.eps = 0.1;
    } else if (name == "fig3") {
        c.delay.eps = 0.01;
    } else if (name == "gu-example") {
        c.delay.eps = 0.01;
        c.t_end = 30.0;
    } else {
        throw ConfigError("unknown preset '" + name + "' (known: fig1, fig2, fig3, gu-example)");
    }
    return c;
}

inline Eigen::MatrixXd matrix_from_rows(const nlohmann::json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("matrix must be a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(j[r].size()) != cols) throw ConfigError("ragged matrix rows");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

/// Overlays a JSON config object on `c`. Delay fields may sit at top level or
/// under "delay".
inline void apply_config_json(RunConfig& c, const nlohmann::json& j) {
    try {
        const nlohmann::json& dj = j.contains("delay") ? j.at("delay") : j;
        DelayProfile base = c.delay;
        DelayProfile p = delay_profile_from_json(dj);
        if (!dj.contains("tau0")) p.tau0 = base.tau0;
        if (!dj.contains("eps")) p.eps = base.eps;
        if (!dj.contains("omega")) p.omega = base.omega;
        if (!dj.contains("kind") && !dj.contains("coefficients")) {
            p.kind = base.kind;
            p.coefficients = base.coefficients;
        }
        c.delay = p;
        if (j.contains("tau_star")) c.tau_star = j.at("tau_star").get<double>();
        if (j.contains("order")) {
            const auto& o = j.at("order");
            c.order = o.is_string() ? o.get<std::string>() : std::to_string(o.get<int>());
        }
        if (j.contains("window")) {
            c.window_start = j.at("window").at(0).get<double>();
            c.window_end = j.at("window").at(1).get<double>();
        }
        if (j.contains("step")) c.step = j.at("step").get<double>();
        if (j.contains("horizon")) c.horizon = j.at("horizon").get<double>();
        if (j.contains("t_end")) c.t_end = j.at("t_end").get<double>();
        if (j.contains("probe_t_end")) c.probe_t_end = j.at("probe_t_end").get<double>();
        if (j.contains("root_tol")) c.root_tol = j.at("root_tol").get<double>();
        if (j.contains("samples_per_interval")) c.samples_per_interval = j.at("samples_per_interval").get<int>();
        if (j.contains("eps_grid")) c.eps_grid = j.at("eps_grid").get<std::vector<double>>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("A0")) c.A0 = matrix_from_rows(j.at("A0"));
        if (j.contains("A1")) c.A1 = matrix_from_rows(j.at("A1"));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse " + path + ": " + e.what());
    }
}

/// Rejects non-positive numeric overrides.
inline void validate_config(const RunConfig& c) {
    auto positive = [](const char* name, double v) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
    };
    positive("tau0", c.delay.tau0);
    positive("omega", c.delay.omega);
    if (!(c.delay.eps >= 0.0)) throw ConfigError("eps must be non-negative");
    if (c.tau_star) positive("tau_star", *c.tau_star);
    if (c.step) positive("step", *c.step);
    if (c.horizon) positive("horizon", *c.horizon);
    positive("t_end", c.t_end);
    positive("probe_t_end", c.probe_t_end);
    positive("root_tol", c.root_tol);
    if (c.samples_per_interval < 2) throw ConfigError("samples_per_interval must be at least 2");
    if (!(c.window_end > c.window_start)) throw ConfigError("window end must exceed window start");
    if (!c.order.empty() && c.order != "1" && c.order != "2" && c.order != "exact") {
        throw ConfigError("order must be 1, 2 or exact");
    }
    for (double e : c.eps_grid) positive("eps_grid entry", e);
    if (c.A0.rows() != c.A0.cols() || c.A1.rows() != c.A1.cols() || c.A0.rows() != c.A1.rows()) {
        throw ConfigError("A0 and A1 must be square and the same size");
    }
}

} // namespace delaywarp
