// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "delaywarp/delaywarp.hpp"
#include "delaywarp/experiments.hpp"

using namespace delaywarp;

namespace {

constexpr double kTau0 = 3.0;
constexpr double kOmega = 5.0;
constexpr std::uint64_t kSeed = 20240917;

// Slope tolerances of the error metric.
constexpr double kSlope1 = 2.0, kSlope1Tol = 0.2;
constexpr double kSlope2 = 3.0, kSlope2Tol = 0.3;
// Abel residual halving ratios.
constexpr double kRatio1Lo = 3.5, kRatio1Hi = 4.5;
constexpr double kRatio2Lo = 7.0, kRatio2Hi = 9.0;
// Propagated transform.
constexpr double kExactResidual = 1e-9;
// Frozen from the measured spread 1.2673e-3 at eps = 0.01 (order 1 vs exact).
constexpr double kSpreadBound = 1.3e-3;
// Frozen from the measured sup difference 1.743e-8 (step min(tau_min, tau*)/100).
constexpr double kEquivalenceBound = 5e-8;
constexpr double kDualPath = 1e-10;

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("AC%d %s  %s | %s | %.2fs (limit %.0fs)%s\n", id, pass ? "PASS" : "FAIL", title, o.detail.c_str(), secs,
                budget_s, in_time ? "" : " TOO SLOW");
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

PeriodicDelay paper_delay(double eps) { return PeriodicDelay::sinusoid(kTau0, kOmega, eps); }

double sup_residual(int order, double eps) {
    const auto d = paper_delay(eps);
    const auto tt = SeriesTransform::build(d, kTau0, order);
    return abel_residual(tt, d, kTau0, linspace(0.0, 6.0 * M_PI, 6001)).sup;
}

Outcome convergence_orders() {
    const std::vector<double> eps{0.0125, 0.025, 0.05, 0.1, 0.2};
    std::vector<double> e1, e2;
    for (double e : eps) {
        const auto d = paper_delay(e);
        e1.push_back(seed_compatibility_error(SeriesTransform::build(d, kTau0, 1), d));
        e2.push_back(seed_compatibility_error(SeriesTransform::build(d, kTau0, 2), d));
    }
    const double s1 = loglog_slope(eps, e1), s2 = loglog_slope(eps, e2);
    return {std::abs(s1 - kSlope1) <= kSlope1Tol && std::abs(s2 - kSlope2) <= kSlope2Tol,
            fmt("slope order1 %.4f (2.0+-0.2), order2 %.4f (3.0+-0.3)", s1, s2)};
}

Outcome residual_orders() {
    const double r1 = sup_residual(1, 0.05) / sup_residual(1, 0.025);
    const double r2 = sup_residual(2, 0.05) / sup_residual(2, 0.025);
    return {r1 >= kRatio1Lo && r1 <= kRatio1Hi && r2 >= kRatio2Lo && r2 <= kRatio2Hi,
            fmt("halving ratio order1 %.4f in [3.5, 4.5], order2 %.4f in [7, 9]", r1, r2)};
}

Outcome propagation_exactness() {
    bool ok = true;
    std::string detail;
    for (const char* preset : {"fig1", "fig2"}) {
        const auto cfg = preset_config(preset);
        const auto d = cfg.delay.build();
        const auto tt = build_exact_transform(d, kTau0, 30.0);
        const double sup = abel_residual(tt, d, kTau0, uniform_points(kSeed, 1000, 0.0, 30.0)).sup;
        ok = ok && sup < kExactResidual;
        detail += fmt("eps=%g sup %.3e; ", cfg.delay.eps, sup);
    }
    return {ok, detail + "bound 1e-9"};
}

Outcome figure_agreement() {
    const auto small = run_approx(preset_config("fig1"));
    const auto large = run_approx(preset_config("fig2"));
    const double s = small.max_spread(), l = large.max_spread();
    return {s < kSpreadBound && l > s, fmt("spread eps=0.01 %.4e (< %.1e), eps=0.1 %.4e (> eps=0.01)", s, kSpreadBound, l)};
}

Outcome monotonicity() {
    double worst = HUGE_VAL;
    for (double eps : {0.05, 0.1, 0.19}) {
        for (int order : {1, 2}) {
            const auto tt = SeriesTransform::build(paper_delay(eps), kTau0, order);
            const double p = tt.period();
            for (int i = 0; i < 10000; ++i) worst = std::min(worst, tt.h_dot(p * i / 10000.0));
        }
    }
    return {worst > 0.0, fmt("min h' over eps {0.05, 0.1, 0.19}, both orders: %.6f", worst)};
}

Outcome equivalence() {
    const auto r = run_equivalence(preset_config("gu-example"));
    return {r.report.sup < kEquivalenceBound,
            fmt("sup |x(h(l)) - x_bar(l)| on [0, 30] = %.3e (< %.0e), step %.4f", r.report.sup, kEquivalenceBound,
                r.step)};
}

Outcome stability_probe_verdict() {
    auto cfg = preset_config("gu-example");
    cfg.probe_t_end = 200.0;
    const auto p1 = run_probe(cfg);
    cfg.delay.eps = 0.1;
    const auto p2 = run_probe(cfg);
    return {p1.verdict == Verdict::decayed,
            fmt("eps=0.01 %s (ratio %.2e); eps=0.1 recorded: %s (ratio %.2e)", to_string(p1.verdict), p1.ratio,
                to_string(p2.verdict), p2.ratio)};
}

Outcome dual_path() {
    double worst = 0.0;
    const auto pts = uniform_points(kSeed, 100, -kTau0, 30.0);
    for (double eps : {0.01, 0.1}) {
        for (int order : {1, 2}) {
            const auto cf = closed_form_sinusoid(order, kTau0, kOmega, eps);
            const auto tt = SeriesTransform::build(paper_delay(eps), kTau0, order);
            for (double l : pts) {
                worst = std::max({worst, std::abs(cf.h(l) - tt.h(l)), std::abs(cf.h_dot(l) - tt.h_dot(l))});
            }
        }
    }
    return {worst < kDualPath, fmt("max |closed form - series| in h and h' = %.3e (< 1e-10)", worst)};
}

Outcome property_suites() {
    SplitMix64 rng(kSeed);
    std::vector<std::string> failed;

    // Hermitian realness and h(0) = 0 for random shapes, tau* != tau0.
    double imag = 0.0, origin = 0.0;
    for (int trial = 0; trial < 30;) {
        const double omega = rng.uniform(0.5, 3.0), tau0 = rng.uniform(1.0, 4.0);
        const int K = 1 + static_cast<int>(rng.next() % 3);
        bool separated = pi_residue(omega * tau0).second > 0.2;
        for (int k = 1; k <= 2 * K && separated; ++k) {
            const double x = std::fmod(k * omega * tau0, 2.0 * M_PI);
            separated = std::min(x, 2.0 * M_PI - x) > 0.2;
        }
        if (!separated) continue;
        ++trial;
        FourierSeries s(omega, K);
        for (int k = 1; k <= K; ++k) {
            s[k] = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) / (2.0 * K * std::sqrt(2.0));
            s[-k] = std::conj(s[k]);
        }
        const auto tt = SeriesTransform::build(PeriodicDelay(tau0, 0.05, s), tau0 * rng.uniform(0.8, 1.2), 2);
        origin = std::max(origin, std::abs(tt.h(0.0)));
        for (int i = 0; i < 50; ++i) {
            const double l = rng.uniform(-tt.tau_star(), 30.0);
            imag = std::max({imag, std::abs(tt.h_complex(l).imag()), std::abs(tt.h_dot_complex(l).imag())});
        }
    }
    if (imag > 1e-10) failed.push_back("realness");
    if (origin > 1e-12) failed.push_back("h(0)=0");

    // g round trip.
    double round_trip = 0.0;
    for (double eps : {0.01, 0.1, 0.19}) {
        const auto d = paper_delay(eps);
        for (int i = 0; i < 200; ++i) {
            const double x = rng.uniform(-3.0, 60.0);
            round_trip = std::max({round_trip, std::abs(d.g(g_inverse(d, x)) - x), std::abs(g_inverse(d, d.g(x)) - x)});
        }
    }
    if (!(round_trip < 1e-10)) failed.push_back("g round trip");

    // RK4 order on x' = -x.
    const DdeSystem decay(Matrix::Constant(1, 1, -1.0), Matrix::Zero(1, 1));
    const auto d0 = paper_delay(0.0);
    const double ea = std::abs(simulate_original(decay, d0, 1.0, 0.1).states().back()(0) - std::exp(-1.0));
    const double eb = std::abs(simulate_original(decay, d0, 1.0, 0.05).states().back()(0) - std::exp(-1.0));
    const double order = std::log2(ea / eb);
    if (std::abs(order - 4.0) > 0.3) failed.push_back("RK4 order");

    // Linearity.
    const auto d = paper_delay(0.1);
    const auto x1 = simulate_original(DdeSystem(gu_A0(), gu_A1()), d, 30.0, 0.03);
    const auto x2 = simulate_original(DdeSystem(gu_A0(), gu_A1(), [](double) { return Vector::Constant(2, 2.0); }), d,
                                      30.0, 0.03);
    double lin = 0.0;
    for (std::size_t i = 0; i < x1.size(); ++i) {
        lin = std::max(lin, (x2.states()[i] - 2.0 * x1.states()[i]).lpNorm<Eigen::Infinity>() /
                                std::max(1e-300, x1.states()[i].lpNorm<Eigen::Infinity>()));
    }
    if (lin > 1e-12) failed.push_back("linearity");

    // gamma linear in eps at first order.
    const double g1 = compute_hdot_bounds(SeriesTransform::build(paper_delay(0.01), kTau0, 1), 0.0, 3.0).gamma;
    const double g2 = compute_hdot_bounds(SeriesTransform::build(paper_delay(0.02), kTau0, 1), 0.0, 3.0).gamma;
    if (std::abs(g2 / g1 - 2.0) > 1e-10) failed.push_back("gamma scaling");

    // PIE assembly determinism.
    const auto bounds = compute_hdot_bounds(SeriesTransform::build(paper_delay(0.01), kTau0, 2), 0.0, 3.0);
    const auto j1 = to_json(assemble_pie(gu_A0(), gu_A1(), bounds, kTau0)).dump();
    const auto j2 = to_json(assemble_pie(gu_A0(), gu_A1(), bounds, kTau0)).dump();
    if (j1 != j2) failed.push_back("PIE determinism");

    std::string detail = fmt("imag %.1e, h(0) %.1e, g %.1e, RK4 order %.3f, linearity %.1e, gamma ratio %.12f", imag,
                             origin, round_trip, order, lin, g2 / g1);
    for (const auto& f : failed) detail += " FAILED:" + f;
    return {failed.empty(), detail};
}

} // namespace

int main() {
    report(1, "convergence orders of e", 5.0, convergence_orders);
    report(2, "Abel residual halving ratios", 5.0, residual_orders);
    report(3, "propagated transform Abel residual", 30.0, propagation_exactness);
    report(4, "h' curve agreement", 60.0, figure_agreement);
    report(5, "monotone window", 60.0, monotonicity);
    report(6, "equivalence of original and transformed systems", 60.0, equivalence);
    report(7, "stability probe", 60.0, stability_probe_verdict);
    report(8, "closed form vs generic series", 60.0, dual_path);
    report(9, "property suites", 60.0, property_suites);
    std::printf("%s: %d of 9 criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
