#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <span>
#include <vector>

#include "delaywarp/periodic_delay.hpp"

namespace delaywarp {

/// Anything that evaluates a time-transformation h and its derivative on [-tau*, ...).
template <class T>
concept TimeTransformLike = requires(const T& t, double lambda) {
    { t.h(lambda) } -> std::convertible_to<double>;
    { t.h_dot(lambda) } -> std::convertible_to<double>;
    { t.tau_star() } -> std::convertible_to<double>;
    { t.domain_start() } -> std::convertible_to<double>;
};

template <TimeTransformLike T>
double eval_h(const T& tt, double lambda) {
    return tt.h(lambda);
}

template <TimeTransformLike T>
double eval_h_dot(const T& tt, double lambda) {
    return tt.h_dot(lambda);
}

struct ResidualStats {
    std::vector<double> values;
    double sup = 0.0;
    double rms = 0.0;
};

/// r(l) = h(l) - tau(h(l)) - h(l - tau*) on the given grid (l >= 0).
template <TimeTransformLike T>
ResidualStats abel_residual(const T& tt, const PeriodicDelay& delay, double tau_star, std::span<const double> grid) {
    ResidualStats st;
    st.values.reserve(grid.size());
    double sq = 0.0;
    for (double lambda : grid) {
        const double hl = tt.h(lambda);
        const double r = hl - delay.tau(hl) - tt.h(lambda - tau_star);
        st.values.push_back(r);
        st.sup = std::max(st.sup, std::abs(r));
        sq += r * r;
    }
    if (!grid.empty()) st.rms = std::sqrt(sq / static_cast<double>(grid.size()));
    return st;
}

/// e = |h'(0) (1 - tau'(0)) - h'(-tau*)|, the mismatch in the seed's
/// derivative-matching condition. Zero for an exact transformation.
template <TimeTransformLike T>
double seed_compatibility_error(const T& tt, const PeriodicDelay& delay) {
    return std::abs(tt.h_dot(0.0) * (1.0 - delay.tau_dot(0.0)) - tt.h_dot(-tt.tau_star()));
}

/// n evenly spaced points on [a, b] inclusive.
inline std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

} // namespace delaywarp
