#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "delaywarp/error.hpp"
#include "delaywarp/fourier.hpp"
#include "delaywarp/periodic_delay.hpp"

namespace delaywarp {

/// Denominator thresholds for 1 - exp(-j k w tau0).
struct ResonanceGuard {
    double fail = 1e-9;
    double warn = 1e-3;
};

/// Fourier data of the first- or second-order approximate time-transformation
///
///   h(l) = (tau0/tau*) l + eps sum b_k e^{jk nu l}
///        + eps^2 ((m0/tau*) l + sum c_k e^{jk nu l}),     nu = w tau0 / tau*.
///
/// `b` has the band of the delay shape, `m` and `c` twice that band.
struct ExpansionCoefficients {
    int order = 1;
    double tau_star = 0.0;
    double tau0 = 0.0;
    double omega = 0.0;
    FourierSeries b;
    double m0 = 0.0;
    FourierSeries m;   // convolution sum; m[0] == m0
    FourierSeries c;
    std::vector<std::string> warnings;

    /// Angular frequency of the expansion in the transformed time.
    [[nodiscard]] double lambda_omega() const noexcept { return omega * tau0 / tau_star; }
    [[nodiscard]] double slope() const noexcept { return tau0 / tau_star; }
    /// Period of h - slope*l in the transformed time.
    [[nodiscard]] double lambda_period() const noexcept { return 2.0 * M_PI / lambda_omega(); }
};

namespace detail {

/// 1 / (1 - exp(-j k w tau0)) with the resonance guard applied.
inline Complex resonant_gain(int k, double omega, double tau0, const ResonanceGuard& guard,
                             std::vector<std::string>& warnings) {
    const Complex den = 1.0 - std::polar(1.0, -k * omega * tau0);
    const double mag = std::abs(den);
    if (mag < guard.fail) {
        throw ResonanceError("harmonic " + std::to_string(k) + " is resonant: |1 - exp(-j k w tau0)| = " +
                             std::to_string(mag));
    }
    if (mag < guard.warn) {
        warnings.push_back("harmonic " + std::to_string(k) + " near resonance (|denominator| = " +
                           std::to_string(mag) + ")");
    }
    return 1.0 / den;
}

/// out_k = src_k * gain_k for k != 0, out_0 = -sum_{k != 0} out_k.
inline FourierSeries solve_difference_equation(const FourierSeries& src, double tau0, double omega_t,
                                               const ResonanceGuard& guard, std::vector<std::string>& warnings,
                                               double lambda_omega) {
    FourierSeries out(lambda_omega, src.order());
    const double scale = std::max(src.abs_sum(), 1e-300);
    Complex sum{};
    for (int k = -src.order(); k <= src.order(); ++k) {
        if (k == 0) continue;
        const Complex s = src[k];
        if (std::abs(s) <= 1e-15 * scale) continue;
        out[k] = s * resonant_gain(k, omega_t, tau0, guard, warnings);
        sum += out[k];
    }
    out[0] = -sum;
    return out;
}

} // namespace detail

inline ExpansionCoefficients first_order_coeffs(const PeriodicDelay& delay, double tau_star,
                                                const ResonanceGuard& guard = {}) {
    if (!(tau_star > 0.0)) throw ConstraintError("tau_star must be positive");
    ExpansionCoefficients ec;
    ec.order = 1;
    ec.tau_star = tau_star;
    ec.tau0 = delay.tau0();
    ec.omega = delay.omega();
    ec.b = detail::solve_difference_equation(delay.shape(), ec.tau0, ec.omega, guard, ec.warnings,
                                             ec.lambda_omega());
    ec.m = FourierSeries(ec.lambda_omega(), 0);
    ec.c = FourierSeries(ec.lambda_omega(), 0);
    return ec;
}

/// m_k = sum_l j l w a_l b_{k-l}, i.e. the coefficients of shape'(h0(l)) * h1(l).
inline FourierSeries drift_convolution(const FourierSeries& shape, const FourierSeries& b, double lambda_omega) {
    const int K = shape.order();
    const int Kb = b.order();
    FourierSeries m(lambda_omega, K + Kb);
    for (int l = -K; l <= K; ++l) {
        const Complex al = Complex(0.0, l * shape.omega()) * shape[l];
        if (al == Complex{}) continue;
        for (int q = -Kb; q <= Kb; ++q) {
            m[l + q] += al * b[q];
        }
    }
    return m;
}

inline ExpansionCoefficients second_order_coeffs(const PeriodicDelay& delay, double tau_star,
                                                 const ResonanceGuard& guard = {}) {
    ExpansionCoefficients ec = first_order_coeffs(delay, tau_star, guard);
    ec.order = 2;
    ec.m = drift_convolution(delay.shape(), ec.b, ec.lambda_omega());
    ec.m0 = ec.m[0].real();
    if (std::abs(ec.m[0].imag()) > 1e-10 * std::max(1.0, std::abs(ec.m[0]))) {
        throw NumericalError("drift coefficient m0 has a non-negligible imaginary part");
    }
    ec.c = detail::solve_difference_equation(ec.m, ec.tau0, ec.omega, guard, ec.warnings, ec.lambda_omega());
    return ec;
}

/// Perturbative time-transformation evaluated by direct summation of its series.
class SeriesTransform {
public:
    SeriesTransform(ExpansionCoefficients coeffs, double eps) : ec_(std::move(coeffs)), eps_(eps) {}

    static SeriesTransform build(const PeriodicDelay& delay, double tau_star, int order,
                                 const ResonanceGuard& guard = {}) {
        if (order == 1) return {first_order_coeffs(delay, tau_star, guard), delay.eps()};
        if (order == 2) return {second_order_coeffs(delay, tau_star, guard), delay.eps()};
        throw ConstraintError("expansion order must be 1 or 2");
    }

    [[nodiscard]] const ExpansionCoefficients& coefficients() const noexcept { return ec_; }
    [[nodiscard]] double eps() const noexcept { return eps_; }
    [[nodiscard]] int order() const noexcept { return ec_.order; }
    [[nodiscard]] double tau_star() const noexcept { return ec_.tau_star; }
    [[nodiscard]] double domain_start() const noexcept { return -ec_.tau_star; }

    /// Complex-valued sum; the imaginary part is a realness diagnostic.
    [[nodiscard]] Complex h_complex(double lambda) const {
        check_domain(lambda);
        Complex v = ec_.slope() * lambda + eps_ * ec_.b.sum(lambda);
        if (ec_.order == 2) {
            v += eps_ * eps_ * ((ec_.m0 / ec_.tau_star) * lambda + ec_.c.sum(lambda));
        }
        return v;
    }

    [[nodiscard]] Complex h_dot_complex(double lambda) const {
        check_domain(lambda);
        Complex v = ec_.slope() + eps_ * ec_.b.derivative_sum(lambda);
        if (ec_.order == 2) {
            v += eps_ * eps_ * (ec_.m0 / ec_.tau_star + ec_.c.derivative_sum(lambda));
        }
        return v;
    }

    [[nodiscard]] double h(double lambda) const { return h_complex(lambda).real(); }
    [[nodiscard]] double h_dot(double lambda) const { return h_dot_complex(lambda).real(); }

    /// Periodic part of h_dot repeats with this period in lambda.
    [[nodiscard]] double period() const noexcept { return ec_.lambda_period(); }

    /// Upper bound on |h_dot - tau0/tau*| from coefficient magnitudes.
    [[nodiscard]] double hdot_deviation_bound() const {
        double s = eps_ * ec_.b.derivative_abs_sum();
        if (ec_.order == 2) s += eps_ * eps_ * (std::abs(ec_.m0) / ec_.tau_star + ec_.c.derivative_abs_sum());
        return s;
    }

private:
    void check_domain(double lambda) const {
        if (lambda < -ec_.tau_star * (1.0 + 1e-14)) {
            throw DomainError("time-transformation evaluated below -tau*");
        }
    }

    ExpansionCoefficients ec_;
    double eps_;
};

/// Hard-coded trigonometric closed forms of the first/second-order expansion
/// for tau(t) = tau0 + eps sin(w t) with tau* = tau0. Independent of the
/// series machinery; used to cross-check it.
class SinusoidTransform {
public:
    SinusoidTransform(int order, double tau0, double omega, double eps, double margin = 1e-6)
        : order_(order), tau0_(tau0), omega_(omega), eps_(eps) {
        if (order != 1 && order != 2) throw ConstraintError("expansion order must be 1 or 2");
        if (!(tau0 > 0.0) || !(omega > 0.0)) throw ConstraintError("tau0 and omega must be positive");
        // Order 1 divides by sin(w tau0/2); order 2 also by sin(w tau0).
        if (pi_residue(omega * tau0).second < margin) {
            throw ResonanceError("omega*tau0 is within margin of a multiple of pi");
        }
        theta_ = omega * tau0;
        s1_ = std::sin(0.5 * theta_);
        s2_ = std::sin(theta_);
        cot_ = std::cos(0.5 * theta_) / s1_;
    }

    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] double tau_star() const noexcept { return tau0_; }
    [[nodiscard]] double domain_start() const noexcept { return -tau0_; }
    [[nodiscard]] double eps() const noexcept { return eps_; }
    [[nodiscard]] double period() const noexcept { return 2.0 * M_PI / omega_; }

    /// Linear drift coefficient of the eps^2 term, -w cot(w tau0/2) / (4 tau0).
    [[nodiscard]] double drift() const noexcept { return -omega_ * cot_ / (4.0 * tau0_); }

    [[nodiscard]] double h(double lambda) const {
        check_domain(lambda);
        const double w = omega_, th = theta_;
        const double h1 = (std::cos(0.5 * th) - std::cos(w * lambda + 0.5 * th)) / (2.0 * s1_);
        double v = lambda + eps_ * h1;
        if (order_ == 2) {
            const double h2 = drift() * lambda +
                              w * (std::sin(1.5 * th) - std::sin(2.0 * w * lambda + 1.5 * th)) / (8.0 * s1_ * s2_) +
                              w * cot_ * (std::sin(w * lambda + 0.5 * th) - std::sin(0.5 * th)) / (4.0 * s1_);
            v += eps_ * eps_ * h2;
        }
        return v;
    }

    [[nodiscard]] double h_dot(double lambda) const {
        check_domain(lambda);
        const double w = omega_, th = theta_;
        double v = 1.0 + eps_ * w * std::sin(w * lambda + 0.5 * th) / (2.0 * s1_);
        if (order_ == 2) {
            const double d2 = drift() - w * w * std::cos(2.0 * w * lambda + 1.5 * th) / (4.0 * s1_ * s2_) +
                              w * w * cot_ * std::cos(w * lambda + 0.5 * th) / (4.0 * s1_);
            v += eps_ * eps_ * d2;
        }
        return v;
    }

private:
    void check_domain(double lambda) const {
        if (lambda < -tau0_ * (1.0 + 1e-14)) throw DomainError("time-transformation evaluated below -tau*");
    }

    int order_;
    double tau0_;
    double omega_;
    double eps_;
    double theta_ = 0.0, s1_ = 0.0, s2_ = 0.0, cot_ = 0.0;
};

inline SinusoidTransform closed_form_sinusoid(int order, double tau0, double omega, double eps) {
    return {order, tau0, omega, eps};
}

} // namespace delaywarp
