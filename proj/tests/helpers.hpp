#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "usfd/signal.hpp"

namespace usfd::testing {

/// sum_i a_i sin(W (t - t_i)) / (W (t - t_i)) on k = 0..n-1 (t = kT), centres
/// within +-spread samples of the middle, rescaled so max |r| = peak.
inline RealVec sinc_mixture(std::size_t n, double T, double W, double peak, std::uint64_t seed,
                            int terms = 8, double spread = 40.0)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_real_distribution<double> off(-spread, spread);
    RealVec r(n, 0.0);
    const double mid = static_cast<double>(n) / 2.0;
    for (int i = 0; i < terms; ++i) {
        const double a = amp(rng);
        const double c = (mid + off(rng)) * T;
        for (std::size_t k = 0; k < n; ++k) {
            const double x = W * (static_cast<double>(k) * T - c);
            r[k] += a * (std::abs(x) < 1e-12 ? 1.0 : std::sin(x) / x);
        }
    }
    double m = 0.0;
    for (double v : r) {
        m = std::max(m, std::abs(v));
    }
    for (auto& v : r) {
        v *= peak / m;
    }
    return r;
}

/// y = x * h, full length, O(N K).
inline ComplexVec naive_convolution(const ComplexVec& x, const RealVec& h)
{
    ComplexVec y(x.size() + h.size() - 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < h.size(); ++j) {
            y[i + j] += x[i] * h[j];
        }
    }
    return y;
}

}  // namespace usfd::testing
