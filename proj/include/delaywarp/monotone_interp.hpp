#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "delaywarp/error.hpp"

namespace delaywarp {

/// Piecewise cubic Hermite interpolant that preserves monotonicity of the data
/// (Fritsch-Carlson). Knot slopes are either supplied or estimated from the
/// data; in both cases they are limited so every cubic piece stays monotone
/// between monotone data.
class MonotoneCubic {
public:
    MonotoneCubic() = default;

    /// Slopes estimated by the Fritsch-Butland harmonic mean of adjacent secants.
    MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        check();
        d_ = estimate_slopes();
        limit();
    }

    /// Slopes supplied by the caller (e.g. known derivatives), then limited.
    MonotoneCubic(std::vector<double> x, std::vector<double> y, std::vector<double> slopes)
        : x_(std::move(x)), y_(std::move(y)), d_(std::move(slopes)) {
        check();
        if (d_.size() != x_.size()) throw ConstraintError("slope count must match knot count");
        limit();
    }

    [[nodiscard]] std::size_t size() const noexcept { return x_.size(); }
    [[nodiscard]] double front() const { return x_.front(); }
    [[nodiscard]] double back() const { return x_.back(); }
    [[nodiscard]] std::span<const double> knots() const noexcept { return x_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return y_; }
    [[nodiscard]] std::span<const double> slopes() const noexcept { return d_; }

    [[nodiscard]] double operator()(double xq) const {
        const std::size_t i = segment(xq);
        const double hseg = x_[i + 1] - x_[i];
        const double s = (xq - x_[i]) / hseg;
        const double s2 = s * s, s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1;
        const double h10 = s3 - 2 * s2 + s;
        const double h01 = -2 * s3 + 3 * s2;
        const double h11 = s3 - s2;
        return h00 * y_[i] + h10 * hseg * d_[i] + h01 * y_[i + 1] + h11 * hseg * d_[i + 1];
    }

    [[nodiscard]] double derivative(double xq) const {
        const std::size_t i = segment(xq);
        const double hseg = x_[i + 1] - x_[i];
        const double s = (xq - x_[i]) / hseg;
        const double s2 = s * s;
        const double d00 = (6 * s2 - 6 * s) / hseg;
        const double d10 = 3 * s2 - 4 * s + 1;
        const double d01 = (-6 * s2 + 6 * s) / hseg;
        const double d11 = 3 * s2 - 2 * s;
        return d00 * y_[i] + d10 * d_[i] + d01 * y_[i + 1] + d11 * d_[i + 1];
    }

private:
    void check() const {
        if (x_.size() < 2 || x_.size() != y_.size()) {
            throw ConstraintError("monotone interpolation needs at least two (x, y) pairs");
        }
        for (std::size_t i = 1; i < x_.size(); ++i) {
            if (!(x_[i] > x_[i - 1])) throw ConstraintError("interpolation knots must be strictly increasing");
        }
    }

    [[nodiscard]] std::vector<double> estimate_slopes() const {
        const std::size_t n = x_.size();
        std::vector<double> delta(n - 1), d(n);
        for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
        if (n == 2) return {delta[0], delta[0]};
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                d[i] = 0.0;
            } else {
                const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
                const double w1 = 2 * h1 + h0, w2 = h1 + 2 * h0;
                d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        // One-sided three-point end slopes, clipped to keep the end pieces monotone.
        auto end_slope = [](double h0, double h1, double del0, double del1) {
            double s = ((2 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
            if (s * del0 <= 0.0) s = 0.0;
            else if (del0 * del1 <= 0.0 && std::abs(s) > std::abs(3 * del0)) s = 3 * del0;
            return s;
        };
        d[0] = end_slope(x_[1] - x_[0], x_[2] - x_[1], delta[0], delta[1]);
        d[n - 1] = end_slope(x_[n - 1] - x_[n - 2], x_[n - 2] - x_[n - 3], delta[n - 2], delta[n - 3]);
        return d;
    }

    void limit() {
        for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
            const double delta = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
            if (delta == 0.0) {
                d_[i] = d_[i + 1] = 0.0;
                continue;
            }
            // Slopes opposing the secant break monotonicity outright.
            if (d_[i] * delta < 0.0) d_[i] = 0.0;
            if (d_[i + 1] * delta < 0.0) d_[i + 1] = 0.0;
            const double a = d_[i] / delta, b = d_[i + 1] / delta;
            const double r2 = a * a + b * b;
            if (r2 > 9.0) {
                const double t = 3.0 / std::sqrt(r2);
                d_[i] = t * a * delta;
                d_[i + 1] = t * b * delta;
            }
        }
    }

    [[nodiscard]] std::size_t segment(double xq) const {
        if (xq < x_.front() || xq > x_.back()) throw DomainError("interpolation query outside knot range");
        auto it = std::upper_bound(x_.begin(), x_.end(), xq);
        std::size_t i = static_cast<std::size_t>(it - x_.begin());
        return std::min(i == 0 ? 0 : i - 1, x_.size() - 2);
    }

    std::vector<double> x_, y_, d_;
};

} // namespace delaywarp
