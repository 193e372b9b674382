#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "delaywarp/abel.hpp"
#include "delaywarp/error.hpp"
#include "delaywarp/periodic_delay.hpp"
#include "delaywarp/transform.hpp"

namespace delaywarp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using HistoryFn = std::function<Vector(double)>;

/// x'(t) = A0 x(t) + A1 x(t - tau(t)) with x = history on the initial interval.
struct DdeSystem {
    Matrix A0;
    Matrix A1;
    HistoryFn history;

    DdeSystem(Matrix a0, Matrix a1, HistoryFn hist) : A0(std::move(a0)), A1(std::move(a1)), history(std::move(hist)) {
        if (A0.rows() != A0.cols() || A1.rows() != A1.cols() || A0.rows() != A1.rows() || A0.rows() == 0) {
            throw ConstraintError("A0 and A1 must be square matrices of the same size");
        }
        if (!history) throw ConstraintError("DDE system needs an initial history");
    }

    /// History x0(t) = ones for all t.
    DdeSystem(Matrix a0, Matrix a1) : DdeSystem(a0, a1, ones_history(a0.rows())) {}

    [[nodiscard]] Eigen::Index n() const noexcept { return A0.rows(); }

    static HistoryFn ones_history(Eigen::Index n) {
        return [n](double) { return Vector::Ones(n); };
    }
};

/// Fixed-grid solution with cubic Hermite dense output built from the stored
/// derivatives at every grid point.
class Trajectory {
public:
    void push(double t, Vector x, Vector dx) {
        if (!t_.empty() && !(t > t_.back())) throw ConstraintError("trajectory grid must be strictly increasing");
        t_.push_back(t);
        x_.push_back(std::move(x));
        dx_.push_back(std::move(dx));
    }

    [[nodiscard]] std::size_t size() const noexcept { return t_.size(); }
    [[nodiscard]] bool empty() const noexcept { return t_.empty(); }
    [[nodiscard]] double front() const { return t_.front(); }
    [[nodiscard]] double back() const { return t_.back(); }
    [[nodiscard]] const std::vector<double>& times() const noexcept { return t_; }
    [[nodiscard]] const std::vector<Vector>& states() const noexcept { return x_; }
    [[nodiscard]] const std::vector<Vector>& derivatives() const noexcept { return dx_; }
    [[nodiscard]] Eigen::Index dim() const { return x_.front().size(); }

    /// Replaces the derivative stored at the last grid point.
    void set_last_derivative(Vector dx) { dx_.back() = std::move(dx); }

    [[nodiscard]] Vector operator()(double t) const {
        if (t_.empty() || t < t_.front() || t > t_.back()) {
            throw DomainError("trajectory queried at t = " + std::to_string(t) + " outside its range");
        }
        if (t_.size() == 1) return x_.front();
        auto it = std::upper_bound(t_.begin(), t_.end(), t);
        std::size_t i = static_cast<std::size_t>(it - t_.begin());
        i = std::min(i == 0 ? 0 : i - 1, t_.size() - 2);
        if (t == t_[i]) return x_[i];
        const double h = t_[i + 1] - t_[i];
        const double s = (t - t_[i]) / h;
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * x_[i] + (s3 - 2 * s2 + s) * h * dx_[i] + (-2 * s3 + 3 * s2) * x_[i + 1] +
               (s3 - s2) * h * dx_[i + 1];
    }

private:
    std::vector<double> t_;
    std::vector<Vector> x_;
    std::vector<Vector> dx_;
};

/// Grid on [0, t_end] that contains every breakpoint and is uniform between
/// consecutive ones, with spacing no larger than `step`.
inline std::vector<double> breakpoint_grid(double t_end, double step, const std::vector<double>& breaks) {
    std::vector<double> knots{0.0};
    for (double b : breaks) {
        if (b > knots.back() + 1e-12 && b < t_end - 1e-12) knots.push_back(b);
    }
    knots.push_back(t_end);
    std::vector<double> grid{0.0};
    for (std::size_t s = 1; s < knots.size(); ++s) {
        const double a = knots[s - 1], len = knots[s] - a;
        const auto n = std::max(1L, static_cast<long>(std::ceil(len / step - 1e-9)));
        for (long i = 1; i < n; ++i) grid.push_back(a + len * static_cast<double>(i) / static_cast<double>(n));
        grid.push_back(knots[s]);
    }
    return grid;
}

/// Classic RK4 for  x'(t) = s(t) (A0 x(t) + A1 x(d(t)))  on [0, t_end] with
/// steps no larger than `step`. The delayed argument d(t) must satisfy
/// d(t) <= t - max_step_lag so it always lands in completed history. Points in
/// `breaks` (derivative discontinuities of the solution) become grid points.
template <class DelayedArg, class Scale>
Trajectory integrate_linear_dde(const Matrix& A0, const Matrix& A1, const HistoryFn& history, DelayedArg&& delayed,
                                Scale&& scale, double t_end, double step, const std::vector<double>& breaks = {}) {
    if (!(t_end > 0.0)) throw DomainError("t_end must be positive");
    if (!(step > 0.0)) throw ConstraintError("step must be positive");
    const std::vector<double> grid = breakpoint_grid(t_end, step, breaks);

    Trajectory traj;
    auto lagged = [&](double t) -> Vector {
        const double td = delayed(t);
        return td <= 0.0 ? history(td) : traj(td);
    };
    auto rhs = [&](double t, const Vector& x) -> Vector { return scale(t) * (A0 * x + A1 * lagged(t)); };

    Vector x = history(0.0);
    traj.push(0.0, x, Vector::Zero(x.size()));
    traj.set_last_derivative(rhs(0.0, x));
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double t = grid[i];
        const double dt = grid[i + 1] - t;
        const Vector k1 = traj.derivatives().back();
        const Vector k2 = rhs(t + 0.5 * dt, x + 0.5 * dt * k1);
        const Vector k3 = rhs(t + 0.5 * dt, x + 0.5 * dt * k2);
        const Vector k4 = rhs(t + dt, x + dt * k3);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double tn = grid[i + 1];
        if (!x.allFinite()) {
            throw NumericalError("state became non-finite at t = " + std::to_string(tn));
        }
        traj.push(tn, x, Vector::Zero(x.size()));
        traj.set_last_derivative(rhs(tn, x));
    }
    return traj;
}

/// Smallest delay guaranteed by the sufficient bound; used for step checks.
inline double min_delay(const PeriodicDelay& delay) { return delay.tau_bounds().first; }

inline double default_step(const PeriodicDelay& delay) { return min_delay(delay) / 100.0; }

/// Discontinuities propagated from t = 0: xi_{k+1} - tau(xi_{k+1}) = xi_k.
inline std::vector<double> original_breakpoints(const PeriodicDelay& delay, double t_end) {
    std::vector<double> xi;
    double t = 0.0;
    while (true) {
        t = g_inverse(delay, t);
        if (!(t < t_end)) break;
        xi.push_back(t);
    }
    return xi;
}

inline std::vector<double> transformed_breakpoints(double tau_star, double t_end) {
    std::vector<double> xi;
    for (int k = 1; k * tau_star < t_end; ++k) xi.push_back(k * tau_star);
    return xi;
}

inline Trajectory simulate_original(const DdeSystem& sys, const PeriodicDelay& delay, double t_end, double step) {
    const double tmin = min_delay(delay);
    if (!(tmin > 0.0)) throw ConstraintError("delay lower bound is not positive");
    if (step > 0.5 * tmin) throw ConstraintError("step must not exceed half the minimum delay");
    return integrate_linear_dde(
        sys.A0, sys.A1, sys.history, [&](double t) { return t - delay.tau(t); }, [](double) { return 1.0; }, t_end,
        step, original_breakpoints(delay, t_end));
}

/// Constant delay tau*, both matrix terms scaled by h'(lambda).
template <TimeTransformLike T>
Trajectory simulate_transformed(const DdeSystem& sys, const T& tt, double tau_star, const HistoryFn& history,
                                double t_end, double step) {
    if (step > 0.5 * tau_star) throw ConstraintError("step must not exceed half of tau*");
    return integrate_linear_dde(
        sys.A0, sys.A1, history, [&](double l) { return l - tau_star; }, [&](double l) { return tt.h_dot(l); },
        t_end, step, transformed_breakpoints(tau_star, t_end));
}

/// Initial function of the transformed system, x0 o h on [-tau*, 0].
template <TimeTransformLike T>
HistoryFn transformed_history(const DdeSystem& sys, const T& tt) {
    return [hist = sys.history, &tt](double lambda) { return hist(tt.h(lambda)); };
}

struct EquivalenceReport {
    double sup = 0.0;
    double rms = 0.0;
    double scale = 0.0;   // sup |x_bar| over the compared grid
    std::size_t points = 0;
};

/// Simulates both systems and compares x(h(l)) against x_bar(l) on the
/// transformed grid over [0, t_end].
template <TimeTransformLike T>
EquivalenceReport verify_equivalence(const DdeSystem& sys, const PeriodicDelay& delay, const T& tt, double t_end,
                                     double step) {
    if (tt.h_dot(t_end) <= 0.0) throw DomainError("transform is not increasing at t_end");
    const Trajectory xbar = simulate_transformed(sys, tt, tt.tau_star(), transformed_history(sys, tt), t_end, step);
    const double t_orig = tt.h(t_end);
    const Trajectory x = simulate_original(sys, delay, t_orig, step);

    EquivalenceReport rep;
    double sq = 0.0;
    for (std::size_t i = 0; i < xbar.size(); ++i) {
        const double lambda = xbar.times()[i];
        const double t = std::min(tt.h(lambda), x.back());
        const double diff = (x(t) - xbar.states()[i]).lpNorm<Eigen::Infinity>();
        rep.sup = std::max(rep.sup, diff);
        rep.scale = std::max(rep.scale, xbar.states()[i].lpNorm<Eigen::Infinity>());
        sq += diff * diff;
    }
    rep.points = xbar.size();
    rep.rms = std::sqrt(sq / static_cast<double>(rep.points));
    return rep;
}

enum class Verdict { decayed, grew, inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::decayed: return "decayed";
        case Verdict::grew: return "grew";
        default: return "inconclusive";
    }
}

struct ProbeOptions {
    double step = 0.0;          // 0: min delay / 100
    double decay_ratio = 1e-3;
    double growth_ratio = 1e3;
};

struct ProbeResult {
    Verdict verdict = Verdict::inconclusive;
    double early_sup = 0.0;     // sup |x| over the first 20% of the window
    double late_sup = 0.0;      // sup |x| over the last 20%
    double ratio = 0.0;
    double t_end = 0.0;
    double step = 0.0;
    bool diverged = false;      // integration hit a non-finite state
};

namespace detail {

inline ProbeResult classify(const Trajectory& traj, double t_end, const ProbeOptions& opt) {
    ProbeResult r;
    r.t_end = t_end;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.times()[i];
        const double v = traj.states()[i].lpNorm<Eigen::Infinity>();
        if (t <= 0.2 * t_end) r.early_sup = std::max(r.early_sup, v);
        if (t >= 0.8 * t_end) r.late_sup = std::max(r.late_sup, v);
    }
    r.ratio = r.late_sup / r.early_sup;
    if (r.ratio < opt.decay_ratio) r.verdict = Verdict::decayed;
    else if (r.ratio > opt.growth_ratio) r.verdict = Verdict::grew;
    return r;
}

} // namespace detail

/// Simulates the original system from the constant ones history and compares
/// the late-window amplitude against the early window.
inline ProbeResult stability_probe(const Matrix& A0, const Matrix& A1, const PeriodicDelay& delay, double t_end,
                                   const ProbeOptions& opt = {}) {
    const double step = opt.step > 0.0 ? opt.step : default_step(delay);
    const DdeSystem sys(A0, A1);
    try {
        ProbeResult r = detail::classify(simulate_original(sys, delay, t_end, step), t_end, opt);
        r.step = step;
        return r;
    } catch (const NumericalError&) {
        ProbeResult r;
        r.verdict = Verdict::grew;
        r.diverged = true;
        r.t_end = t_end;
        r.step = step;
        return r;
    }
}

/// Same probe on the transformed constant-delay system.
template <TimeTransformLike T>
ProbeResult stability_probe(const Matrix& A0, const Matrix& A1, const T& tt, double tau_star, double t_end,
                            const ProbeOptions& opt = {}) {
    const double step = opt.step > 0.0 ? opt.step : tau_star / 100.0;
    const DdeSystem sys(A0, A1);
    try {
        ProbeResult r =
            detail::classify(simulate_transformed(sys, tt, tau_star, sys.history, t_end, step), t_end, opt);
        r.step = step;
        return r;
    } catch (const NumericalError&) {
        ProbeResult r;
        r.verdict = Verdict::grew;
        r.diverged = true;
        r.t_end = t_end;
        r.step = step;
        return r;
    }
}

/// CSV with columns t,x_1..x_n at 17 significant digits.
inline void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
    os << "t";
    for (Eigen::Index i = 0; i < traj.dim(); ++i) os << ",x_" << (i + 1);
    os << '\n';
    char buf[40];
    for (std::size_t k = 0; k < traj.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", traj.times()[k]);
        os << buf;
        for (Eigen::Index i = 0; i < traj.dim(); ++i) {
            std::snprintf(buf, sizeof buf, ",%.17g", traj.states()[k](i));
            os << buf;
        }
        os << '\n';
    }
}

} // namespace delaywarp
