#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "delaywarp/fourier.hpp"
#include "delaywarp/periodic_delay.hpp"
#include "delaywarp/random.hpp"

namespace delaywarp::testing {

/// Random real shape with K harmonics and sum |a_k| <= 1, a_0 = 0.
inline FourierSeries random_shape(SplitMix64& rng, double omega, int K) {
    FourierSeries s(omega, K);
    std::vector<Complex> raw(static_cast<std::size_t>(K));
    double total = 0.0;
    for (int k = 1; k <= K; ++k) {
        raw[k - 1] = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
        total += 2.0 * std::abs(raw[k - 1]);
    }
    const double scale = rng.uniform(0.3, 1.0) / total;
    for (int k = 1; k <= K; ++k) {
        s[k] = raw[k - 1] * scale;
        s[-k] = std::conj(s[k]);
    }
    return s;
}

/// omega * tau0 kept at least `margin` away from every multiple of 2 pi for harmonics up to 2K.
inline bool well_separated(double omega, double tau0, int K, double margin = 0.2) {
    for (int k = 1; k <= 2 * K; ++k) {
        const double x = std::fmod(k * omega * tau0, 2.0 * M_PI);
        if (std::min(x, 2.0 * M_PI - x) < margin) return false;
    }
    return pi_residue(omega * tau0).second >= margin;
}

} // namespace delaywarp::testing
