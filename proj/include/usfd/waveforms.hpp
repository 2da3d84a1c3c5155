#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "usfd/signal.hpp"

namespace usfd {

enum class PulseKind { Rectangular, RootRaisedCosine };

/// Finite-support transmit pulse. Taps are normalised so that a unit-energy
/// symbol stream yields unit average sample power.
struct PulseShape {
    PulseKind kind = PulseKind::RootRaisedCosine;
    double rolloff = 0.25;
    int span_symbols = 8;

    static PulseShape rectangular() { return {PulseKind::Rectangular, 0.0, 1}; }
    static PulseShape root_raised_cosine(double rolloff = 0.25, int span_symbols = 8)
    {
        return {PulseKind::RootRaisedCosine, rolloff, span_symbols};
    }
};

RealVec pulse_taps(const PulseShape& pulse, int samples_per_symbol);
/// Index of the matched-filter output peak for a symbol at index 0 (taps - 1).
std::size_t matched_filter_lag(const PulseShape& pulse, int samples_per_symbol);
/// One-sided bandwidth in rad/s.
double pulse_bandwidth(const PulseShape& pulse, double symbol_period);

/// Gray-mapped unit-energy QPSK: bit pair (b0, b1) -> ((1-2b0) + j(1-2b1))/sqrt(2).
ComplexVec qpsk_modulate(std::span<const std::uint8_t> bits);
BitVec random_bits(std::size_t count, std::uint64_t seed);

/// Semi-discrete convolution sum_n c[n] phi(t - n T_sym) on the sample grid
/// (full convolution, length (N-1)*sps + taps).
BasebandSignal pulse_shape(std::span<const Complex> symbols, int samples_per_symbol,
                           const PulseShape& pulse, double symbol_period);

/// T_p-periodic bandlimited reference signal described by its Fourier series.
struct PilotSpec {
    double period = 0.0;       // T_p, seconds
    int harmonics = 0;         // P
    ComplexVec coefficients;   // gamma_p for p = -P..P, stored at index p + P
    int sample_count = 0;      // K, samples per period

    double fundamental() const;  // omega_0 = 2 pi / T_p
    Complex coefficient(int p) const;
    double sample_interval() const { return period / sample_count; }
    /// Throws std::invalid_argument when conjugate symmetry, size or K >= 2P+1 fail.
    void validate() const;
};

/// Flat-spectrum pilot: |gamma_p| = amplitude for 1 <= |p| <= P with seeded
/// random phases, gamma_0 = 0, conjugate symmetric.
PilotSpec make_random_pilot(int harmonics, int sample_count, double period, double amplitude,
                            std::uint64_t seed);

/// One period: samples[k] = sum_p gamma_p e^{j p w0 k T}. Throws when K*T != T_p.
BasebandSignal generate_pilot(const PilotSpec& spec, double sample_interval);

/// gain * gamma(kT - delay) for k = 0..count-1, evaluated from the Fourier series.
BasebandSignal sample_pilot(const PilotSpec& spec, std::size_t count, double delay = 0.0,
                            double gain = 1.0);

enum class ChannelKind { SelfInterference, Uplink };

/// Single-path channel A delta(t - tau); delay in seconds.
struct SparseChannel {
    double amplitude = 1.0;
    double delay = 0.0;
    ChannelKind kind = ChannelKind::SelfInterference;
};

/// sqrt(power) * A * x(kT - tau), treating x as one period of a periodic
/// signal: integer delays are circular shifts, fractional delays a per-bin
/// phase ramp.
BasebandSignal apply_sparse_channel(const BasebandSignal& x, const SparseChannel& channel,
                                    double power = 1.0);

struct MixtureConfig {
    double p_u = 1.0;
    double p_d = 1.0;
    std::optional<double> snr_db;  // noise power referenced to the SoI term; unset = noiseless
    std::optional<double> sir_db;  // when set, the SI term is rescaled to meet it exactly
    /// Overrides the measured SoI power as the SNR reference (needed when no SoI is present).
    std::optional<double> noise_reference_power;
    std::uint64_t seed = 0;
};

struct Mixture {
    BasebandSignal received;
    ComplexVec soi;    // sqrt(p_u) * soi
    ComplexVec si;     // SI term as added
    ComplexVec noise;
};

Mixture compose_mixture(const BasebandSignal& soi, const BasebandSignal& si, const MixtureConfig& cfg);
BasebandSignal compose_received(const BasebandSignal& soi, const BasebandSignal& si,
                                const MixtureConfig& cfg);

/// Circularly-symmetric complex Gaussian samples with E|n|^2 = variance.
ComplexVec complex_gaussian(std::size_t count, double variance, std::uint64_t seed);

}  // namespace usfd
