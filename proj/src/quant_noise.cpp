#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "usfd/frontend.hpp"
#include "usfd/rng.hpp"

namespace usfd {

QuantNoiseReport quant_noise_analysis(const ModuloAdcConfig& cfg, double signal_peak,
                                      std::optional<OversamplingParams> oversampling)
{
    cfg.validate();
    if (!(signal_peak > 0.0)) {
        throw std::invalid_argument("quant_noise_analysis: signal peak must be positive");
    }
    if (!cfg.bits) {
        throw std::invalid_argument("quant_noise_analysis: bit count required");
    }
    const double zeta = cfg.lambda / signal_peak;
    if (zeta > 1.0 + 1e-12) {
        throw std::invalid_argument("quant_noise_analysis: zeta must lie in (0, 1]");
    }
    QuantNoiseReport r;
    r.zeta = zeta;
    r.bits = *cfg.bits;
    r.q0_conventional = std::ldexp(2.0 * signal_peak, -r.bits);
    r.q0_modulo = std::ldexp(cfg.dynamic_range(), -r.bits);
    r.sigma_q_sq = r.q0_conventional * r.q0_conventional / 12.0;
    r.sigma_qlambda_sq = zeta * zeta * r.sigma_q_sq;
    r.effective_bits = r.bits + std::log2(1.0 / zeta);
    r.sqnr_gain_db = 20.0 * std::log10(1.0 / zeta);
    if (oversampling) {
        const double c = oversampling->sample_interval * oversampling->bandwidth * std::numbers::e;
        if (!(c > 0.0) || c >= 1.0) {
            throw std::invalid_argument("quant_noise_analysis: T*Omega*e must lie in (0, 1)");
        }
        r.sqnr_gain_bound_db = -20.0 * oversampling->order * std::log10(c);
    }
    return r;
}

namespace {

constexpr std::size_t kChunk = 1 << 16;

struct Partial {
    double conv = 0.0;
    double mod = 0.0;
    std::size_t count = 0;
};

Partial run_chunk(double zeta, int bits, std::size_t count, std::uint64_t seed, double a)
{
    Rng rng(seed);
    std::uniform_real_distribution<double> u(-a, a);
    const double lambda = zeta * a;
    const QuantizerSpec conv{2.0 * a, bits};
    const QuantizerSpec mod{2.0 * lambda, bits};
    Partial p;
    p.count = count;
    for (std::size_t k = 0; k < count; ++k) {
        const double x = u(rng);
        const double ec = quantize_midrise(x, conv) - x;
        const double f = modulo_fold(x, lambda);
        const double em = quantize_midrise(f, mod) - f;
        p.conv += ec * ec;
        p.mod += em * em;
    }
    return p;
}

MeasuredQuantNoise measure_impl(double zeta, int bits, std::size_t samples, std::uint64_t seed,
                                double amplitude, bool parallel)
{
    if (!(amplitude > 0.0)) {
        throw std::invalid_argument("measure_quant_noise: amplitude must be positive");
    }
    if (!(zeta > 0.0) || zeta > 1.0) {
        throw std::invalid_argument("measure_quant_noise: zeta must lie in (0, 1]");
    }
    if (bits < 1 || samples == 0) {
        throw std::invalid_argument("measure_quant_noise: need bits >= 1 and samples > 0");
    }
    const std::size_t chunks = (samples + kChunk - 1) / kChunk;
    std::vector<Partial> parts(chunks);
    const auto nc = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::ptrdiff_t c = 0; c < nc; ++c) {
        const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
        const std::size_t count = std::min(kChunk, samples - begin);
        parts[c] = run_chunk(zeta, bits, count, derive_seed(seed, static_cast<std::uint64_t>(c)), amplitude);
    }
    Partial total;
    for (const auto& p : parts) {
        total.conv += p.conv;
        total.mod += p.mod;
        total.count += p.count;
    }
    MeasuredQuantNoise m;
    m.conventional_var = total.conv / static_cast<double>(total.count);
    m.modulo_var = total.mod / static_cast<double>(total.count);
    m.gap_db = 10.0 * std::log10(m.conventional_var / m.modulo_var);
    return m;
}

}  // namespace

MeasuredQuantNoise measure_quant_noise(double zeta, int bits, std::size_t samples, std::uint64_t seed,
                                       double amplitude)
{
    return measure_impl(zeta, bits, samples, seed, amplitude, true);
}

namespace serial {

MeasuredQuantNoise measure_quant_noise(double zeta, int bits, std::size_t samples, std::uint64_t seed,
                                       double amplitude)
{
    return measure_impl(zeta, bits, samples, seed, amplitude, false);
}

}  // namespace serial

}  // namespace usfd
