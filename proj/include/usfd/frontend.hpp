#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "usfd/signal.hpp"

namespace usfd {

/// Centered modulo M_lambda(x) = 2 lambda ([[x / 2 lambda + 1/2]] - 1/2), range [-lambda, lambda).
/// Throws std::invalid_argument for non-finite x or lambda <= 0.
double modulo_fold(double x, double lambda);

/// Mid-rise uniform quantizer over [-span/2, span/2) with 2^bits levels.
/// bits unset means an ideal (pass-through) quantizer.
struct QuantizerSpec {
    double span = 2.0;
    std::optional<int> bits;

    double step() const;
};

/// Nearest mid-rise level; inputs outside the span saturate to the end levels.
/// Level boundaries round up.
double quantize_midrise(double x, const QuantizerSpec& q);

struct ModuloAdcConfig {
    double lambda = 1.0;
    std::optional<int> bits;

    double dynamic_range() const { return 2.0 * lambda; }
    QuantizerSpec quantizer() const { return {dynamic_range(), bits}; }
    void validate() const;
};

double quantize_midrise(double x, const ModuloAdcConfig& cfg);

/// Folded, quantized samples; I and Q rails independently.
BasebandSignal modulo_adc(const BasebandSignal& x, const ModuloAdcConfig& cfg);
/// Fold only (no quantizer), for residue bookkeeping.
BasebandSignal fold_signal(const BasebandSignal& x, double lambda);
/// Clip to [-span/2, span/2] then mid-rise quantize with step 2^-b span.
BasebandSignal conventional_adc(const BasebandSignal& x, double span, std::optional<int> bits);

namespace serial {
BasebandSignal modulo_adc(const BasebandSignal& x, const ModuloAdcConfig& cfg);
BasebandSignal conventional_adc(const BasebandSignal& x, double span, std::optional<int> bits);
}  // namespace serial

struct OversamplingParams {
    int order = 1;           // L
    double sample_interval = 0.0;  // T
    double bandwidth = 0.0;        // Omega, rad/s
};

struct QuantNoiseReport {
    double zeta = 1.0;
    int bits = 0;
    double q0_conventional = 0.0;  // step over the full span 2 * peak
    double q0_modulo = 0.0;        // step over 2 lambda
    double sigma_q_sq = 0.0;
    double sigma_qlambda_sq = 0.0;
    double effective_bits = 0.0;   // b + log2(1/zeta)
    double sqnr_gain_db = 0.0;     // 20 log10(1/zeta)
    std::optional<double> sqnr_gain_bound_db;  // -20 L log10(T Omega e)
};

/// Analytic noise budget for a modulo ADC with threshold cfg.lambda against a
/// conventional ADC spanning [-peak, peak] with the same bit count.
QuantNoiseReport quant_noise_analysis(const ModuloAdcConfig& cfg, double signal_peak,
                                      std::optional<OversamplingParams> oversampling = std::nullopt);

struct MeasuredQuantNoise {
    double conventional_var = 0.0;
    double modulo_var = 0.0;
    double gap_db = 0.0;
};

/// Monte Carlo over uniform inputs on [-a, a): conventional ADC (span 2a) vs
/// modulo ADC with lambda = zeta * a. Chunk-seeded so the result is independent
/// of thread count.
MeasuredQuantNoise measure_quant_noise(double zeta, int bits, std::size_t samples, std::uint64_t seed,
                                       double amplitude = 1.0);

namespace serial {
MeasuredQuantNoise measure_quant_noise(double zeta, int bits, std::size_t samples, std::uint64_t seed,
                                       double amplitude = 1.0);
}  // namespace serial

}  // namespace usfd
