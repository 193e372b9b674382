#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "delaywarp/error.hpp"
#include "delaywarp/monotone_interp.hpp"
#include "delaywarp/periodic_delay.hpp"
#include "delaywarp/perturbation.hpp"
#include "delaywarp/root_finding.hpp"
#include "delaywarp/transform.hpp"

namespace delaywarp {

/// Where the knot slopes of the propagated table come from.
enum class KnotSlopes {
    propagated,  // seed derivative pushed through h'(l) = h'(l - tau*) / (1 - tau'(h(l)))
    estimated,   // three-point estimates from the knot values alone
};

struct AbelOptions {
    double root_tol = 1e-12;        // tolerance on g(t) - x and on t, scaled by max(1, |x|)
    int max_iter = 200;
    int samples_per_interval = 800;
    int fit_points = 200;
    int positivity_points = 2000;
    KnotSlopes slopes = KnotSlopes::propagated;
};

/// Solves t - tau(t) = x inside [x + tau_min, x + tau_max].
inline double g_inverse(const PeriodicDelay& delay, double x, const AbelOptions& opt = {}) {
    const auto [tmin, tmax] = delay.tau_bounds();
    const double lo = x + tmin, hi = x + tmax;
    auto f = [&](double t) { return t - delay.tau(t) - x; };
    if (lo == hi) {
        return lo;
    }
    // g' >= slip, so |g(t) - x| <= tol * slip also bounds the error in t by tol.
    const double slip = std::clamp(1.0 - delay.eps() * delay.shape().derivative_abs_sum(), 1e-6, 1.0);
    RootOptions ro;
    ro.ftol = opt.root_tol * std::max(1.0, std::abs(x)) * slip;
    ro.max_iter = opt.max_iter;
    return brent_root(f, lo, hi, ro).root;
}

/// Seed phi(l) = p l + q0 + sum_{k=1}^{3} (q_k cos(k nu l) + r_k sin(k nu l)) on [-tau*, 0].
class SeedFunction {
public:
    static constexpr int kHarmonics = 3;
    static constexpr int kSize = 2 + 2 * kHarmonics;
    using Coefficients = std::array<double, kSize>;  // p, q0, q1..q3, r1..r3

    SeedFunction(double tau_star, double omega, const Coefficients& coeffs)
        : tau_star_(tau_star), omega_(omega), coeffs_(coeffs) {}

    /// Basis row: value of each basis function at l.
    [[nodiscard]] static Coefficients basis(double lambda, double omega) {
        Coefficients row{};
        row[0] = lambda;
        row[1] = 1.0;
        for (int k = 1; k <= kHarmonics; ++k) {
            row[1 + k] = std::cos(k * omega * lambda);
            row[1 + kHarmonics + k] = std::sin(k * omega * lambda);
        }
        return row;
    }

    [[nodiscard]] static Coefficients basis_derivative(double lambda, double omega) {
        Coefficients row{};
        row[0] = 1.0;
        row[1] = 0.0;
        for (int k = 1; k <= kHarmonics; ++k) {
            row[1 + k] = -k * omega * std::sin(k * omega * lambda);
            row[1 + kHarmonics + k] = k * omega * std::cos(k * omega * lambda);
        }
        return row;
    }

    [[nodiscard]] double operator()(double lambda) const { return dot(basis(lambda, omega_)); }
    [[nodiscard]] double derivative(double lambda) const { return dot(basis_derivative(lambda, omega_)); }

    [[nodiscard]] double tau_star() const noexcept { return tau_star_; }
    [[nodiscard]] double omega() const noexcept { return omega_; }
    [[nodiscard]] const Coefficients& coefficients() const noexcept { return coeffs_; }
    [[nodiscard]] double p() const noexcept { return coeffs_[0]; }

    /// Fit diagnostics, filled by fit_seed().
    double fit_sup_error = 0.0;
    double constraint_condition = 0.0;

private:
    [[nodiscard]] double dot(const Coefficients& row) const {
        double s = 0.0;
        for (int i = 0; i < kSize; ++i) s += row[i] * coeffs_[i];
        return s;
    }

    double tau_star_;
    double omega_;
    Coefficients coeffs_;
};

/// Residuals of the four seed conditions.
struct SeedConditions {
    double origin = 0.0;        // phi(0)
    double left_end = 0.0;      // phi(-tau*) + tau(0)
    double slope_match = 0.0;   // phi'(0) (1 - tau'(0)) - phi'(-tau*)
    double min_slope = 0.0;     // min phi' on a dense grid

    [[nodiscard]] bool ok(double tol = 1e-10, double slope_tol = 1e-8) const {
        return std::abs(origin) < tol && std::abs(left_end) < tol && std::abs(slope_match) < slope_tol &&
               min_slope > 0.0;
    }
};

inline SeedConditions check_seed(const SeedFunction& seed, const PeriodicDelay& delay, int grid = 2000) {
    SeedConditions c;
    const double ts = seed.tau_star();
    c.origin = seed(0.0);
    c.left_end = seed(-ts) + delay.tau(0.0);
    c.slope_match = seed.derivative(0.0) * (1.0 - delay.tau_dot(0.0)) - seed.derivative(-ts);
    c.min_slope = HUGE_VAL;
    for (int i = 0; i <= grid; ++i) c.min_slope = std::min(c.min_slope, seed.derivative(-ts + ts * i / grid));
    return c;
}

/// Least-squares fit of the seed basis to `target` on [-tau*, 0], with the
/// three equality conditions imposed exactly through null-space elimination.
template <TimeTransformLike Target>
SeedFunction fit_seed(const PeriodicDelay& delay, double tau_star, const Target& target, const AbelOptions& opt = {}) {
    constexpr int n = SeedFunction::kSize;
    const double nu = delay.omega() * delay.tau0() / tau_star;

    Eigen::Matrix<double, 3, n> C;
    Eigen::Vector3d d;
    const auto b0 = SeedFunction::basis(0.0, nu);
    const auto bl = SeedFunction::basis(-tau_star, nu);
    const auto db0 = SeedFunction::basis_derivative(0.0, nu);
    const auto dbl = SeedFunction::basis_derivative(-tau_star, nu);
    const double slip = 1.0 - delay.tau_dot(0.0);
    for (int i = 0; i < n; ++i) {
        C(0, i) = b0[i];
        C(1, i) = bl[i];
        C(2, i) = db0[i] * slip - dbl[i];
    }
    d << 0.0, -delay.tau(0.0), 0.0;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cond = sv(0) / sv(2);
    if (!(sv(2) > 1e-12 * sv(0))) {
        throw NumericalError("seed constraint system is ill-conditioned (condition estimate " + std::to_string(cond) + ")");
    }
    const Eigen::VectorXd x_p = svd.solve(d);
    const Eigen::MatrixXd null = svd.matrixV().rightCols(n - 3);

    const int m = std::max(opt.fit_points, n);
    Eigen::MatrixXd A(m, n);
    Eigen::VectorXd y(m);
    for (int i = 0; i < m; ++i) {
        const double lambda = -tau_star + tau_star * i / (m - 1);
        const auto row = SeedFunction::basis(lambda, nu);
        for (int j = 0; j < n; ++j) A(i, j) = row[j];
        y(i) = target.h(lambda);
    }
    const Eigen::VectorXd z = (A * null).colPivHouseholderQr().solve(y - A * x_p);
    const Eigen::VectorXd x = x_p + null * z;

    SeedFunction::Coefficients coeffs{};
    for (int i = 0; i < n; ++i) coeffs[i] = x(i);
    SeedFunction seed(tau_star, nu, coeffs);
    seed.constraint_condition = cond;
    seed.fit_sup_error = (A * x - y).cwiseAbs().maxCoeff();

    const auto cc = check_seed(seed, delay, opt.positivity_points);
    if (!(cc.min_slope > 0.0)) {
        throw NumericalError("fitted seed is not strictly increasing (min slope " + std::to_string(cc.min_slope) +
                             "); eps too large or basis too small");
    }
    return seed;
}

/// Time-transformation realised as a dense knot table on a uniform grid over
/// [-tau*, horizon] with monotone cubic Hermite interpolation between knots.
class PropagatedTransform {
public:
    PropagatedTransform(double tau_star, std::vector<double> lambda, std::vector<double> h, std::vector<double> h_dot,
                        double root_tol = 0.0, std::optional<SeedFunction> seed = std::nullopt)
        : tau_star_(tau_star), root_tol_(root_tol), seed_(std::move(seed)),
          interp_(std::move(lambda), std::move(h), std::move(h_dot)) {
        const auto v = interp_.values();
        for (std::size_t i = 1; i < v.size(); ++i) {
            if (!(v[i] > v[i - 1])) throw ConstraintError("knot table values are not strictly increasing");
        }
    }

    [[nodiscard]] double tau_star() const noexcept { return tau_star_; }
    [[nodiscard]] double domain_start() const noexcept { return interp_.front(); }
    [[nodiscard]] double horizon() const noexcept { return interp_.back(); }
    [[nodiscard]] double root_tolerance() const noexcept { return root_tol_; }
    [[nodiscard]] const std::optional<SeedFunction>& seed() const noexcept { return seed_; }

    [[nodiscard]] std::span<const double> knots() const noexcept { return interp_.knots(); }
    [[nodiscard]] std::span<const double> knot_values() const noexcept { return interp_.values(); }
    [[nodiscard]] std::span<const double> knot_slopes() const noexcept { return interp_.slopes(); }

    [[nodiscard]] double h(double lambda) const {
        check(lambda);
        return interp_(clamp(lambda));
    }

    /// Derivative of the interpolant.
    [[nodiscard]] double h_dot(double lambda) const {
        check(lambda);
        return interp_.derivative(clamp(lambda));
    }

private:
    void check(double lambda) const {
        const double slack = 1e-12 * std::max(1.0, std::abs(lambda));
        if (lambda < interp_.front() - slack || lambda > interp_.back() + slack) {
            throw DomainError("lambda = " + std::to_string(lambda) + " outside propagated range [" +
                              std::to_string(interp_.front()) + ", " + std::to_string(interp_.back()) + "]");
        }
    }
    [[nodiscard]] double clamp(double lambda) const { return std::clamp(lambda, interp_.front(), interp_.back()); }

    double tau_star_;
    double root_tol_;
    std::optional<SeedFunction> seed_;
    MonotoneCubic interp_;
};

inline double eval_exact(const PropagatedTransform& tt, double lambda) { return tt.h(lambda); }
inline double eval_exact_dot(const PropagatedTransform& tt, double lambda) { return tt.h_dot(lambda); }

/// h(l) = phi(l) on [-tau*, 0), g^{-1}(h(l - tau*)) for l >= 0, tabulated
/// interval by interval up to the first multiple of tau* >= horizon.
inline PropagatedTransform propagate(const SeedFunction& seed, const PeriodicDelay& delay, double horizon,
                                     const AbelOptions& opt = {}) {
    const auto cond = check_seed(seed, delay, opt.positivity_points);
    if (!cond.ok()) {
        std::ostringstream os;
        os << "seed violates its conditions: phi(0)=" << cond.origin << " phi(-tau*)+tau(0)=" << cond.left_end
           << " slope mismatch=" << cond.slope_match << " min slope=" << cond.min_slope;
        throw ConstraintError(os.str());
    }
    if (!(horizon >= 0.0)) throw DomainError("horizon must be non-negative");

    const double ts = seed.tau_star();
    const int N = opt.samples_per_interval;
    if (N < 2) throw ConstraintError("need at least two samples per interval");
    const int intervals = std::max(1, static_cast<int>(std::ceil(horizon / ts - 1e-12)));
    const std::size_t total = static_cast<std::size_t>(N) * static_cast<std::size_t>(intervals + 1) + 1;

    std::vector<double> lambda(total), h(total), hd(total);
    for (std::size_t j = 0; j < total; ++j) lambda[j] = -ts + ts * static_cast<double>(j) / N;

    for (std::size_t j = 0; j < static_cast<std::size_t>(N); ++j) {
        h[j] = seed(lambda[j]);
        hd[j] = seed.derivative(lambda[j]);
    }
    for (std::size_t j = N; j < total; ++j) {
        h[j] = g_inverse(delay, h[j - N], opt);
        hd[j] = hd[j - N] / (1.0 - delay.tau_dot(h[j]));
        if (!(h[j] > h[j - 1])) {
            std::ostringstream os;
            os.precision(17);
            os << "propagated table lost monotonicity at lambda=" << lambda[j] << ": h=" << h[j]
               << " previous=" << h[j - 1];
            throw NumericalError(os.str());
        }
    }
    if (opt.slopes == KnotSlopes::estimated) {
        MonotoneCubic est(lambda, h);
        hd.assign(est.slopes().begin(), est.slopes().end());
    }

    for (std::size_t j = N; j < total; ++j) {
        const double r = h[j] - delay.tau(h[j]) - h[j - N];
        if (std::abs(r) > 10.0 * opt.root_tol * std::max(1.0, std::abs(h[j - N]))) {
            throw NumericalError("knot Abel residual " + std::to_string(r) + " exceeds tolerance");
        }
    }
    return {ts, std::move(lambda), std::move(h), std::move(hd), opt.root_tol, seed};
}

/// Seed fitted to the second-order expansion on [-tau*, 0], propagated to `horizon`.
inline PropagatedTransform build_exact_transform(const PeriodicDelay& delay, double tau_star, double horizon,
                                                 const AbelOptions& opt = {}) {
    const auto target = SeriesTransform::build(delay, tau_star, 2);
    const auto seed = fit_seed(delay, tau_star, target, opt);
    return propagate(seed, delay, horizon, opt);
}

/// Chain-rule derivative h'(l - tau*) / (1 - tau'(h(l))) for l >= 0; an
/// independent check on the interpolant derivative.
template <TimeTransformLike T>
double chain_rule_h_dot(const T& tt, const PeriodicDelay& delay, double lambda) {
    return tt.h_dot(lambda - tt.tau_star()) / (1.0 - delay.tau_dot(tt.h(lambda)));
}

/// CSV knot table: lambda,h,h_dot with 17 significant digits.
inline void write_knot_table(const PropagatedTransform& tt, std::ostream& os) {
    os << "lambda,h,h_dot\n";
    const auto x = tt.knots();
    const auto y = tt.knot_values();
    const auto d = tt.knot_slopes();
    char buf[96];
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x[i], y[i], d[i]);
        os << buf;
    }
}

inline PropagatedTransform read_knot_table(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("lambda,h,h_dot", 0) != 0) {
        throw ConfigError("knot table must start with header lambda,h,h_dot");
    }
    std::vector<double> x, y, d;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        double a, b, c;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &a, &b, &c) != 3) {
            throw ConfigError("malformed knot table row: " + line);
        }
        x.push_back(a);
        y.push_back(b);
        d.push_back(c);
    }
    if (x.size() < 2) throw ConfigError("knot table needs at least two rows");
    const double ts = -x.front();
    return {ts, std::move(x), std::move(y), std::move(d)};
}

} // namespace delaywarp
