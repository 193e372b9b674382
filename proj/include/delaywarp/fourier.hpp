#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "delaywarp/error.hpp"

namespace delaywarp {

using Complex = std::complex<double>;

/// Band-limited complex Fourier series  f(t) = sum_{k=-K}^{K} c_k exp(j k w t).
///
/// Coefficients are stored densely over the band [-K, K]. The same type
/// holds the delay shape a_k and the derived expansion coefficients b_k, c_k.
class FourierSeries {
public:
    FourierSeries() = default;

    /// Zero series with fundamental angular frequency `omega` and band `order`.
    FourierSeries(double omega, int order)
        : omega_(omega), order_(order), coeffs_(static_cast<std::size_t>(2 * order + 1)) {
        if (!(omega > 0.0) || !std::isfinite(omega)) {
            throw ConstraintError("Fourier series frequency must be positive and finite");
        }
        if (order < 0) {
            throw ConstraintError("Fourier series order must be non-negative");
        }
    }

    /// Pure sinusoid sin(omega t): a_1 = 1/(2j), a_{-1} = -1/(2j).
    static FourierSeries sinusoid(double omega) {
        FourierSeries s(omega, 1);
        const Complex a1 = 1.0 / Complex(0.0, 2.0);
        s[1] = a1;
        s[-1] = -a1;
        return s;
    }

    [[nodiscard]] double omega() const noexcept { return omega_; }
    [[nodiscard]] int order() const noexcept { return order_; }

    [[nodiscard]] Complex operator[](int k) const {
        return in_band(k) ? coeffs_[index(k)] : Complex{};
    }
    Complex& operator[](int k) {
        if (!in_band(k)) {
            throw DomainError("harmonic " + std::to_string(k) + " outside band of order " +
                              std::to_string(order_));
        }
        return coeffs_[index(k)];
    }

    [[nodiscard]] bool in_band(int k) const noexcept { return k >= -order_ && k <= order_; }

    /// Full complex sum; the imaginary part is a realness diagnostic.
    [[nodiscard]] Complex sum(double t) const {
        Complex acc{};
        for (int k = -order_; k <= order_; ++k) {
            const Complex c = coeffs_[index(k)];
            if (c != Complex{}) {
                acc += c * std::polar(1.0, k * omega_ * t);
            }
        }
        return acc;
    }

    /// Term-by-term derivative  sum j k w c_k exp(j k w t).
    [[nodiscard]] Complex derivative_sum(double t) const {
        Complex acc{};
        for (int k = -order_; k <= order_; ++k) {
            const Complex c = coeffs_[index(k)];
            if (c != Complex{}) {
                acc += Complex(0.0, k * omega_) * c * std::polar(1.0, k * omega_ * t);
            }
        }
        return acc;
    }

    [[nodiscard]] double value(double t) const { return sum(t).real(); }
    [[nodiscard]] double derivative(double t) const { return derivative_sum(t).real(); }

    /// sum_k |c_k|, an upper bound on sup_t |f(t)|.
    [[nodiscard]] double abs_sum() const {
        double s = 0.0;
        for (const auto& c : coeffs_) s += std::abs(c);
        return s;
    }

    /// sum_k |k w c_k|, an upper bound on sup_t |f'(t)|.
    [[nodiscard]] double derivative_abs_sum() const {
        double s = 0.0;
        for (int k = -order_; k <= order_; ++k) s += std::abs(k * omega_) * std::abs(coeffs_[index(k)]);
        return s;
    }

    /// Largest |c_{-k} - conj(c_k)| over the band.
    [[nodiscard]] double hermitian_defect() const {
        double d = 0.0;
        for (int k = 0; k <= order_; ++k) {
            d = std::max(d, std::abs(coeffs_[index(-k)] - std::conj(coeffs_[index(k)])));
        }
        return d;
    }

    [[nodiscard]] bool is_zero() const {
        for (const auto& c : coeffs_) {
            if (c != Complex{}) return false;
        }
        return true;
    }

    [[nodiscard]] double period() const noexcept { return 2.0 * M_PI / omega_; }

private:
    [[nodiscard]] std::size_t index(int k) const noexcept {
        return static_cast<std::size_t>(k + order_);
    }

    double omega_ = 1.0;
    int order_ = 0;
    std::vector<Complex> coeffs_ = std::vector<Complex>(1);
};

} // namespace delaywarp
