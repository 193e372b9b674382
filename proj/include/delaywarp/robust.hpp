#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "delaywarp/dde.hpp"
#include "delaywarp/error.hpp"
#include "delaywarp/transform.hpp"

namespace delaywarp {

/// h_l <= h'(lambda) <= h_u with midpoint h_bar and radius gamma.
struct HdotBounds {
    double h_l = 0.0;
    double h_u = 0.0;
    double h_bar = 0.0;
    double gamma = 0.0;
    std::string method;                      // "sampled" or "sampled+analytic"
    std::optional<double> analytic_radius;   // coefficient-sum bound on |h' - tau0/tau*|
    double window_start = 0.0;
    double window_end = 0.0;
};

struct BoundsOptions {
    int points_per_period = 2000;
    double golden_tol = 1e-13;
};

namespace detail {

template <class F>
double golden_max(F&& f, double lo, double hi, double tol) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol * std::max(1.0, std::abs(a))) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - r * (b - a); fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + r * (b - a); fd = f(d);
        }
    }
    return std::max({fc, fd, f(0.5 * (a + b))});
}

template <class T>
concept PeriodicTransform = TimeTransformLike<T> && requires(const T& t) {
    { t.period() } -> std::convertible_to<double>;
};

template <class T>
concept SeriesBounded = requires(const T& t) {
    { t.hdot_deviation_bound() } -> std::convertible_to<double>;
};

template <TimeTransformLike T>
std::pair<double, double> sampled_extrema(const T& tt, double a, double b, int n, double tol) {
    const double dl = (b - a) / n;
    double lo = HUGE_VAL, hi = -HUGE_VAL;
    int ilo = 0, ihi = 0;
    for (int i = 0; i <= n; ++i) {
        const double v = tt.h_dot(a + dl * i);
        if (v < lo) { lo = v; ilo = i; }
        if (v > hi) { hi = v; ihi = i; }
    }
    auto bracket = [&](int i) { return std::pair{std::max(a, a + dl * (i - 1)), std::min(b, a + dl * (i + 1))}; };
    {
        auto [l, r] = bracket(ihi);
        hi = std::max(hi, golden_max([&](double x) { return tt.h_dot(x); }, l, r, tol));
    }
    {
        auto [l, r] = bracket(ilo);
        lo = std::min(lo, -golden_max([&](double x) { return -tt.h_dot(x); }, l, r, tol));
    }
    return {lo, hi};
}

} // namespace detail

/// Bounds on h' over [a, b]. Periodic (perturbative) transforms are sampled
/// over exactly one period starting at a, which makes the bounds global;
/// other transforms are sampled over the whole window.
template <TimeTransformLike T>
HdotBounds compute_hdot_bounds(const T& tt, double a, double b, const BoundsOptions& opt = {}) {
    if (!(b > a)) throw DomainError("empty bounds window");
    if (a < tt.domain_start()) throw DomainError("bounds window starts before the transform's domain");
    HdotBounds hb;
    hb.window_start = a;
    hb.window_end = b;
    hb.method = "sampled";
    std::pair<double, double> ext;
    if constexpr (detail::PeriodicTransform<T>) {
        const double period = tt.period();
        if (b - a < period * (1.0 - 1e-12)) {
            throw DomainError("bounds window is shorter than one period of h'");
        }
        ext = detail::sampled_extrema(tt, a, a + period, opt.points_per_period, opt.golden_tol);
    } else {
        const int n = std::max(opt.points_per_period,
                               static_cast<int>(std::ceil(opt.points_per_period * (b - a) / tt.tau_star())));
        ext = detail::sampled_extrema(tt, a, b, n, opt.golden_tol);
    }
    if constexpr (detail::SeriesBounded<T>) {
        hb.analytic_radius = tt.hdot_deviation_bound();
        hb.method = "sampled+analytic";
    }
    hb.h_l = ext.first;
    hb.h_u = ext.second;
    if (!(hb.h_l > 0.0)) throw ConstraintError("h' is not bounded away from zero on the window");
    hb.h_bar = 0.5 * (hb.h_u + hb.h_l);
    hb.gamma = 0.5 * (hb.h_u - hb.h_l);
    return hb;
}

/// delta(lambda) = h'(lambda) - h_bar.
template <TimeTransformLike T>
double delta_signal(const T& tt, double h_bar, double lambda) {
    return tt.h_dot(lambda) - h_bar;
}

/// Nominal constant-delay system G of the [G, Delta] interconnection:
///   x' = h_bar A0 x + h_bar A1 x(l - tau*) + v,   w = A0 x + A1 x(l - tau*),
/// with v = delta(l) w and |delta| <= gamma.
struct FeedbackForm {
    Eigen::Index n = 0;
    double tau_star = 0.0;
    double h_bar = 0.0;
    double gamma = 0.0;
    Matrix A;     // h_bar A0
    Matrix Ad;    // h_bar A1
    Matrix Cw;    // A0
    Matrix Dw;    // A1
};

inline FeedbackForm assemble_feedback_form(const Matrix& A0, const Matrix& A1, const HdotBounds& bounds,
                                           double tau_star) {
    FeedbackForm f;
    f.n = A0.rows();
    f.tau_star = tau_star;
    f.h_bar = bounds.h_bar;
    f.gamma = bounds.gamma;
    f.A = bounds.h_bar * A0;
    f.Ad = bounds.h_bar * A1;
    f.Cw = A0;
    f.Dw = A1;
    return f;
}

/// One monomial coeff * s^s_power * theta^theta_power of a matrix-valued kernel.
struct KernelTerm {
    int s_power = 0;
    int theta_power = 0;
    Matrix coeff;
};

/// Matrix-valued polynomial kernel; no terms means the zero kernel of the given size.
struct PolyKernel {
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    std::vector<KernelTerm> terms;

    static PolyKernel zero(Eigen::Index r, Eigen::Index c) { return {r, c, {}}; }
    static PolyKernel constant(const Matrix& m) { return {m.rows(), m.cols(), {{0, 0, m}}}; }
};

/// PI operator on R^n x L2^m[-1, 0]:
///   [P x + int Q1(s) Phi(s) ds;  Q2(s) x + R0(s) Phi(s) + int_{-1}^s R1 Phi + int_s^0 R2 Phi].
struct PiOperator {
    Eigen::Index in_ode = 0, in_pde = 0, out_ode = 0, out_pde = 0;
    Matrix P;
    PolyKernel Q1, Q2, R0, R1, R2;
};

struct PieOperatorData {
    Eigen::Index n = 0;   // ODE state dimension
    Eigen::Index m = 0;   // distributed state dimension
    double tau_star = 0.0;
    double h_bar = 0.0;
    double gamma = 0.0;
    PiOperator T, A, B, C, D;
};

namespace detail {

inline PiOperator pi_operator(Eigen::Index in_ode, Eigen::Index in_pde, Eigen::Index out_ode, Eigen::Index out_pde) {
    PiOperator op;
    op.in_ode = in_ode;
    op.in_pde = in_pde;
    op.out_ode = out_ode;
    op.out_pde = out_pde;
    op.P = Matrix::Zero(out_ode, in_ode);
    op.Q1 = PolyKernel::zero(out_ode, in_pde);
    op.Q2 = PolyKernel::zero(out_pde, in_ode);
    op.R0 = PolyKernel::zero(out_pde, in_pde);
    op.R1 = PolyKernel::zero(out_pde, in_pde);
    op.R2 = PolyKernel::zero(out_pde, in_pde);
    return op;
}

} // namespace detail

/// PIE form  T x' = A x + B v,  w = C x + D v  of the nominal system with the
/// state (x_bar, d/ds phi) and s in [-1, 0].
inline PieOperatorData assemble_pie(const Matrix& A0, const Matrix& A1, const HdotBounds& bounds, double tau_star) {
    if (A0.rows() != A0.cols() || A1.rows() != A0.rows() || A1.cols() != A0.cols()) {
        throw ConstraintError("A0 and A1 must be square matrices of the same size");
    }
    if (!(tau_star > 0.0)) throw ConstraintError("tau_star must be positive");
    const Eigen::Index n = A0.rows();
    const Matrix I = Matrix::Identity(n, n);
    PieOperatorData pie;
    pie.n = n;
    pie.m = n;
    pie.tau_star = tau_star;
    pie.h_bar = bounds.h_bar;
    pie.gamma = bounds.gamma;

    pie.T = detail::pi_operator(n, n, n, n);
    pie.T.P = I;
    pie.T.Q2 = PolyKernel::constant(I);
    pie.T.R2 = PolyKernel::constant(-I);

    pie.A = detail::pi_operator(n, n, n, n);
    pie.A.P = bounds.h_bar * (A0 + A1);
    pie.A.Q1 = PolyKernel::constant(-bounds.h_bar * A1);
    pie.A.R0 = PolyKernel::constant(I / tau_star);

    // v enters the ODE part only.
    pie.B = detail::pi_operator(n, 0, n, n);
    pie.B.P = I;

    // w has no distributed part.
    pie.C = detail::pi_operator(n, n, n, 0);
    pie.C.P = A0 + A1;
    pie.C.Q1 = PolyKernel::constant(-A1);

    pie.D = detail::pi_operator(n, 0, n, 0);
    return pie;
}

// ---- JSON -------------------------------------------------------------------

inline nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    j["data"] = data;
    return j;
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) throw ConfigError("matrix data size mismatch");
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r * cols + c)];
    return m;
}

inline nlohmann::json to_json(const FeedbackForm& f) {
    return {{"n", f.n},
            {"tau_star", f.tau_star},
            {"h_bar", f.h_bar},
            {"gamma", f.gamma},
            {"A", matrix_to_json(f.A)},
            {"Ad", matrix_to_json(f.Ad)},
            {"Cw", matrix_to_json(f.Cw)},
            {"Dw", matrix_to_json(f.Dw)}};
}

inline FeedbackForm feedback_form_from_json(const nlohmann::json& j) {
    FeedbackForm f;
    f.n = j.at("n").get<Eigen::Index>();
    f.tau_star = j.at("tau_star").get<double>();
    f.h_bar = j.at("h_bar").get<double>();
    f.gamma = j.at("gamma").get<double>();
    f.A = matrix_from_json(j.at("A"));
    f.Ad = matrix_from_json(j.at("Ad"));
    f.Cw = matrix_from_json(j.at("Cw"));
    f.Dw = matrix_from_json(j.at("Dw"));
    return f;
}

inline nlohmann::json to_json(const PolyKernel& k) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : k.terms) {
        terms.push_back({{"s_power", t.s_power}, {"theta_power", t.theta_power}, {"coeff", matrix_to_json(t.coeff)}});
    }
    return {{"rows", k.rows}, {"cols", k.cols}, {"terms", terms}};
}

inline nlohmann::json to_json(const PiOperator& op) {
    return {{"dims", {{"in", {op.in_ode, op.in_pde}}, {"out", {op.out_ode, op.out_pde}}}},
            {"P", matrix_to_json(op.P)},
            {"Q1", to_json(op.Q1)},
            {"Q2", to_json(op.Q2)},
            {"R0", to_json(op.R0)},
            {"R1", to_json(op.R1)},
            {"R2", to_json(op.R2)}};
}

inline nlohmann::json to_json(const PieOperatorData& pie) {
    return {{"n", pie.n},
            {"m", pie.m},
            {"tau_star", pie.tau_star},
            {"h_bar", pie.h_bar},
            {"gamma", pie.gamma},
            {"s_domain", {-1.0, 0.0}},
            {"operators",
             {{"T", to_json(pie.T)}, {"A", to_json(pie.A)}, {"B", to_json(pie.B)}, {"C", to_json(pie.C)},
              {"D", to_json(pie.D)}}},
            {"iqc",
             {{"type", "hard"},
              {"psi", "identity"},
              {"multiplier", "K = [[gamma^2 P, R], [R*, -P]]"},
              {"gamma", pie.gamma}}}};
}

inline nlohmann::json to_json(const HdotBounds& b) {
    nlohmann::json j = {{"h_l", b.h_l},       {"h_u", b.h_u},
                        {"h_bar", b.h_bar},   {"gamma", b.gamma},
                        {"method", b.method}, {"window", {b.window_start, b.window_end}}};
    if (b.analytic_radius) j["analytic_radius"] = *b.analytic_radius;
    return j;
}

} // namespace delaywarp
