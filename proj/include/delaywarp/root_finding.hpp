#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "delaywarp/error.hpp"

namespace delaywarp {

struct RootOptions {
    double ftol = 1e-12;   // accept when |f(x)| <= ftol
    double xtol = 0.0;     // accept when the bracket is narrower than this (0: machine limit)
    int max_iter = 200;
};

struct RootResult {
    double root = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

/// Brent's method (zeroin) on a sign-changing bracket [a, b]. Each step takes
/// an inverse-quadratic or secant proposal when it stays inside the bracket and
/// shrinks it fast enough, bisection otherwise, so the bracket always contracts.
template <class F>
RootResult brent_root(F&& f, double a, double b, const RootOptions& opt = {}) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return {a, 0.0, 0};
    if (fb == 0.0) return {b, 0.0, 0};
    if ((fa > 0.0) == (fb > 0.0)) {
        throw NumericalError("root not bracketed on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    }

    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int it = 1; it <= opt.max_iter; ++it) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * eps * std::abs(b) + 0.5 * opt.xtol;
        const double half = 0.5 * (c - b);
        if (std::abs(fb) <= opt.ftol || std::abs(half) <= tol || fb == 0.0) {
            return {b, fb, it};
        }
        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * half * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * half * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * half * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = half;
                e = d;
            }
        } else {
            d = half;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol) ? d : (half > 0.0 ? tol : -tol);
        fb = f(b);
    }
    if (std::abs(fb) <= opt.ftol) return {b, fb, opt.max_iter};
    throw NumericalError("root finder did not converge in " + std::to_string(opt.max_iter) + " iterations");
}

} // namespace delaywarp
