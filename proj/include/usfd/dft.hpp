#pragma once

#include <span>

#include "usfd/signal.hpp"

namespace usfd {

/// X[n] = sum_k x[k] e^{-j 2 pi n k / N}, any length.
ComplexVec fft(std::span<const Complex> x);
/// Inverse with 1/N scaling, so ifft(fft(x)) == x.
ComplexVec ifft(std::span<const Complex> x);

/// O(N^2) reference transform used by tests.
ComplexVec naive_dft(std::span<const Complex> x);

ComplexVec to_complex(std::span<const double> x);

}  // namespace usfd
