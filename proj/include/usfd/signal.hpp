#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace usfd {

using Complex = std::complex<double>;
using RealVec = std::vector<double>;
using ComplexVec = std::vector<Complex>;
using BitVec = std::vector<std::uint8_t>;

/// Uniformly sampled complex baseband waveform.
///
/// The in-phase and quadrature rails are the real and imaginary parts of the
/// samples; ADC front-ends and unfolding treat them as independent real
/// channels.
class BasebandSignal {
public:
    /// Throws std::invalid_argument on empty samples or non-positive T / bandwidth.
    BasebandSignal(ComplexVec samples, double sample_interval, double bandwidth);

    static BasebandSignal from_rails(std::span<const double> in_phase,
                                     std::span<const double> quadrature,
                                     double sample_interval, double bandwidth);

    const ComplexVec& samples() const { return samples_; }
    ComplexVec& samples() { return samples_; }
    std::size_t size() const { return samples_.size(); }
    double sample_interval() const { return sample_interval_; }
    /// Bandwidth in rad/s.
    double bandwidth() const { return bandwidth_; }

    RealVec in_phase() const;
    RealVec quadrature() const;

    /// Mean of |x|^2.
    double power() const;
    /// Largest magnitude over both rails, i.e. the ADC-relevant peak.
    double rail_peak() const;

    /// Same grid and bandwidth, new samples.
    BasebandSignal with_samples(ComplexVec samples) const;

private:
    ComplexVec samples_;
    double sample_interval_;
    double bandwidth_;
};

double mean_power(std::span<const Complex> x);
double rail_peak(std::span<const Complex> x);
double mean_squared_error(std::span<const Complex> a, std::span<const Complex> b);

}  // namespace usfd
