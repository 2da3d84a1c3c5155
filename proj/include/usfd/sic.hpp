#pragma once

#include <optional>
#include <span>

#include "usfd/signal.hpp"
#include "usfd/waveforms.hpp"

namespace usfd {

struct MetricSet {
    double nmse = 0.0;
    double mse = 0.0;
    double ber = 0.0;
    double sic_db = 0.0;  // 10 log10(|truth|^2 / |truth - estimate|^2)
};

/// mse = mean |e|^2, nmse = |e|^2 / |truth|^2, ber = Hamming / bit count.
/// Throws std::invalid_argument on length mismatch or zero-energy truth.
MetricSet compute_metrics(std::span<const Complex> estimate, std::span<const Complex> truth,
                          std::span<const std::uint8_t> bits_est, std::span<const std::uint8_t> bits_true);

double bit_error_rate(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

/// A_hat * reference delayed by tau_hat (circular, phase ramp for fractional delays).
BasebandSignal reconstruct_si(const SparseChannel& channel, const BasebandSignal& tx_reference,
                              double power = 1.0);

struct SicResult {
    BasebandSignal r_si_hat;
    BasebandSignal r_soi;
    double residual_si_power = 0.0;           // needs the true SI
    std::optional<double> residual_si_power_db;  // 10 log10 of the above
    std::optional<double> sic_db;             // P_SI / P_residual in dB
};

/// r_soi = recovered - si_hat. With the true SI, reports the suppression achieved.
SicResult cancel_si(const BasebandSignal& recovered, const BasebandSignal& si_hat,
                    std::optional<std::span<const Complex>> si_truth = std::nullopt);

struct NlmsConfig {
    int order = 32;
    double step = 0.5;
    double regularizer = 1e-6;
};

/// Complex NLMS over the causal regressor [x[k], x[k-1], ..., x[k-order+1]];
/// returns the a-priori filter output y[k] = w^H u[k] as the SI estimate.
BasebandSignal nlms_estimate(const BasebandSignal& tx_reference, const BasebandSignal& received,
                             const NlmsConfig& cfg);

/// Matched filter, symbol-rate sampling at the filter peak, division by the
/// uplink gain and sign slicing. The symbol count is derived from the signal
/// length as produced by pulse_shape.
BitVec qpsk_detect(const BasebandSignal& r_soi, const SparseChannel& h_u, int samples_per_symbol,
                   const PulseShape& pulse);

}  // namespace usfd
