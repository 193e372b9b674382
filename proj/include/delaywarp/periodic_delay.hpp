#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "delaywarp/error.hpp"
#include "delaywarp/fourier.hpp"

namespace delaywarp {

/// Delay tau(t) = tau0 + eps * shape(t) with a real, zero-mean, periodic shape.
///
/// Construction checks only structure (positive tau0, non-negative eps,
/// Hermitian coefficients). The analytic hypotheses (tau > 0, tau' < 1,
/// non-resonance, ...) are reported by validate_hypotheses() so that a
/// failing delay can still be inspected.
class PeriodicDelay {
public:
    PeriodicDelay(double tau0, double eps, FourierSeries shape)
        : tau0_(tau0), eps_(eps), shape_(std::move(shape)) {
        if (!(tau0 > 0.0) || !std::isfinite(tau0)) {
            throw ConstraintError("tau0 must be positive and finite");
        }
        if (!(eps >= 0.0) || !std::isfinite(eps)) {
            throw ConstraintError("eps must be non-negative and finite");
        }
        if (shape_.hermitian_defect() > 1e-12 * std::max(1.0, shape_.abs_sum())) {
            throw ConstraintError("delay shape coefficients are not Hermitian (a_{-k} != conj(a_k))");
        }
    }

    /// tau0 + eps sin(omega t).
    static PeriodicDelay sinusoid(double tau0, double omega, double eps) {
        return {tau0, eps, FourierSeries::sinusoid(omega)};
    }

    [[nodiscard]] double tau0() const noexcept { return tau0_; }
    [[nodiscard]] double eps() const noexcept { return eps_; }
    [[nodiscard]] double omega() const noexcept { return shape_.omega(); }
    [[nodiscard]] const FourierSeries& shape() const noexcept { return shape_; }
    [[nodiscard]] double period() const noexcept { return shape_.period(); }

    [[nodiscard]] double tau(double t) const {
        const double v = tau0_ + eps_ * shape_.value(t);
        if (!(v > 0.0)) {
            throw ConstraintError("delay evaluated to a non-positive value at t = " + std::to_string(t));
        }
        return v;
    }

    [[nodiscard]] double tau_dot(double t) const { return eps_ * shape_.derivative(t); }

    /// Conservative [tau_min, tau_max] from sum |a_k|.
    [[nodiscard]] std::pair<double, double> tau_bounds() const {
        const double s = eps_ * shape_.abs_sum();
        return {tau0_ - s, tau0_ + s};
    }

    /// Delayed-argument map g(t) = t - tau(t).
    [[nodiscard]] double g(double t) const { return t - tau(t); }

private:
    double tau0_;
    double eps_;
    FourierSeries shape_;
};

inline double eval_tau(const PeriodicDelay& d, double t) { return d.tau(t); }
inline double eval_tau_dot(const PeriodicDelay& d, double t) { return d.tau_dot(t); }

struct HypothesisOptions {
    double eps_ratio = 0.2;          // eps/tau0 must stay below this
    double resonance_fail = 1e-6;    // rad
    double resonance_warn = 0.05;    // rad
    int samples = 10000;             // dense fallback, per period
};

struct HypothesisCheck {
    std::string name;
    bool passed = false;
    bool fatal = true;      // informational checks never fail the report
    std::string method;     // "bound", "sampled" or "exact"
    double value = 0.0;
    double threshold = 0.0;
    std::string warning;
};

struct HypothesisReport {
    std::vector<HypothesisCheck> checks;
    double resonance_residue = 0.0;   // fmod(omega tau0, pi)
    double resonance_margin = 0.0;    // distance of omega tau0 to the nearest m pi

    [[nodiscard]] bool ok() const {
        return std::all_of(checks.begin(), checks.end(),
                           [](const HypothesisCheck& c) { return c.passed || !c.fatal; });
    }

    [[nodiscard]] const HypothesisCheck& at(const std::string& name) const {
        for (const auto& c : checks) {
            if (c.name == name) return c;
        }
        throw DomainError("no hypothesis check named " + name);
    }
};

namespace detail {

template <class F>
double sampled_max(F&& f, double period, int n) {
    double m = -HUGE_VAL;
    for (int i = 0; i < n; ++i) m = std::max(m, f(period * i / n));
    return m;
}

} // namespace detail

/// Distance of x to the nearest integer multiple of pi (m >= 0).
inline std::pair<double, double> pi_residue(double x) {
    const double r = std::fmod(x, M_PI);
    return {r, std::min(r, M_PI - r)};
}

inline HypothesisReport validate_hypotheses(const PeriodicDelay& d, const HypothesisOptions& opt = {}) {
    HypothesisReport rep;
    const auto& shape = d.shape();
    const double period = d.period();

    {
        HypothesisCheck c{"shape_bounded", false, false, "bound", shape.abs_sum(), 1.0, {}};
        c.passed = c.value <= 1.0;
        if (!c.passed) {
            c.method = "sampled";
            c.value = detail::sampled_max([&](double t) { return std::abs(shape.value(t)); }, period, opt.samples);
            c.passed = c.value <= 1.0 + 1e-12;
        }
        if (!c.passed) c.warning = "shape leaves [-1, 1]; eps no longer measures the amplitude";
        rep.checks.push_back(c);
    }
    {
        const double bound = d.tau0() - d.eps() * shape.abs_sum();
        HypothesisCheck c{"tau_positive", bound > 0.0, true, "bound", bound, 0.0, {}};
        if (!c.passed) {
            c.method = "sampled";
            c.value = -detail::sampled_max([&](double t) { return -(d.tau0() + d.eps() * shape.value(t)); },
                                           period, opt.samples);
            c.passed = c.value > 0.0;
        }
        rep.checks.push_back(c);
    }
    {
        const double bound = d.eps() * shape.derivative_abs_sum();
        HypothesisCheck c{"tau_dot_below_one", bound < 1.0, true, "bound", bound, 1.0, {}};
        if (!c.passed) {
            c.method = "sampled";
            c.value = detail::sampled_max([&](double t) { return d.tau_dot(t); }, period, opt.samples);
            c.passed = c.value < 1.0;
        }
        rep.checks.push_back(c);
    }
    {
        const double ratio = d.eps() / d.tau0();
        HypothesisCheck c{"eps_small", ratio < opt.eps_ratio, true, "exact", ratio, opt.eps_ratio, {}};
        if (d.eps() == 0.0) c.warning = "eps = 0: constant delay, expansion is trivial";
        rep.checks.push_back(c);
    }
    {
        const double a0 = std::abs(shape[0]);
        rep.checks.push_back({"a0_zero", a0 < 1e-12, true, "exact", a0, 1e-12, {}});
    }
    {
        auto [residue, margin] = pi_residue(d.omega() * d.tau0());
        rep.resonance_residue = residue;
        rep.resonance_margin = margin;
        HypothesisCheck c{"non_resonance", margin >= opt.resonance_fail, true, "exact", margin, opt.resonance_fail, {}};
        if (c.passed && margin < opt.resonance_warn) {
            c.warning = "omega*tau0 is near a multiple of pi; expansion coefficients are amplified";
        }
        rep.checks.push_back(c);
    }
    return rep;
}

} // namespace delaywarp
