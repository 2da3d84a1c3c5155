#include "usfd/dft.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

namespace usfd {

ComplexVec fft(std::span<const Complex> x)
{
    if (x.empty()) {
        return {};
    }
    Eigen::FFT<double> engine;
    ComplexVec in(x.begin(), x.end());
    ComplexVec out;
    engine.fwd(out, in);
    return out;
}

ComplexVec ifft(std::span<const Complex> x)
{
    if (x.empty()) {
        return {};
    }
    Eigen::FFT<double> engine;
    ComplexVec in(x.begin(), x.end());
    ComplexVec out;
    engine.inv(out, in);
    return out;
}

ComplexVec naive_dft(std::span<const Complex> x)
{
    const std::size_t n = x.size();
    ComplexVec out(n);
    for (std::size_t f = 0; f < n; ++f) {
        Complex acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            // reduce the product first so the twiddle angle stays small
            const auto idx = static_cast<double>((f * k) % n);
            acc += x[k] * std::polar(1.0, -2.0 * std::numbers::pi * idx / static_cast<double>(n));
        }
        out[f] = acc;
    }
    return out;
}

ComplexVec to_complex(std::span<const double> x)
{
    return ComplexVec(x.begin(), x.end());
}

}  // namespace usfd
