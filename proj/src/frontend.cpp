#include "usfd/frontend.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace usfd {

double modulo_fold(double x, double lambda)
{
    if (!std::isfinite(x)) {
        throw std::invalid_argument("modulo_fold: non-finite input");
    }
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("modulo_fold: lambda must be positive");
    }
    const double u = x / (2.0 * lambda) + 0.5;
    double f = u - std::floor(u);
    if (f >= 1.0) {
        f = 0.0;  // u just below an integer can round up to 1
    }
    double y = 2.0 * lambda * (f - 0.5);
    if (y >= lambda) {
        y = -lambda;
    }
    return y;
}

double QuantizerSpec::step() const
{
    if (!bits) {
        return 0.0;
    }
    return std::ldexp(span, -*bits);
}

double quantize_midrise(double x, const QuantizerSpec& q)
{
    if (!q.bits) {
        return x;
    }
    const double step = q.step();
    const double half = q.span / 2.0;
    const double top = std::ldexp(1.0, *q.bits) - 1.0;
    const double idx = std::clamp(std::floor((x + half) / step), 0.0, top);
    return -half + (idx + 0.5) * step;
}

void ModuloAdcConfig::validate() const
{
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("ModuloAdcConfig: lambda must be positive");
    }
    if (bits && (*bits < 1 || *bits > 52)) {
        throw std::invalid_argument("ModuloAdcConfig: bits must be in [1, 52]");
    }
}

double quantize_midrise(double x, const ModuloAdcConfig& cfg) { return quantize_midrise(x, cfg.quantizer()); }

namespace {

template <class F>
BasebandSignal map_rails(const BasebandSignal& x, F f, bool parallel)
{
    const auto& in = x.samples();
    ComplexVec out(in.size());
    const auto n = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for schedule(static) if (parallel && n > 4096)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        out[k] = {f(in[k].real()), f(in[k].imag())};
    }
    return x.with_samples(std::move(out));
}

BasebandSignal modulo_adc_impl(const BasebandSignal& x, const ModuloAdcConfig& cfg, bool parallel)
{
    cfg.validate();
    const QuantizerSpec q = cfg.quantizer();
    const double lambda = cfg.lambda;
    return map_rails(
        x, [&](double v) { return quantize_midrise(modulo_fold(v, lambda), q); }, parallel);
}

BasebandSignal conventional_impl(const BasebandSignal& x, double span, std::optional<int> bits,
                                 bool parallel)
{
    if (!(span > 0.0)) {
        throw std::invalid_argument("conventional_adc: span must be positive");
    }
    const QuantizerSpec q{span, bits};
    const double half = span / 2.0;
    return map_rails(
        x, [&](double v) { return quantize_midrise(std::clamp(v, -half, half), q); }, parallel);
}

}  // namespace

BasebandSignal modulo_adc(const BasebandSignal& x, const ModuloAdcConfig& cfg)
{
    return modulo_adc_impl(x, cfg, true);
}

BasebandSignal fold_signal(const BasebandSignal& x, double lambda)
{
    return modulo_adc(x, ModuloAdcConfig{lambda, std::nullopt});
}

BasebandSignal conventional_adc(const BasebandSignal& x, double span, std::optional<int> bits)
{
    return conventional_impl(x, span, bits, true);
}

namespace serial {

BasebandSignal modulo_adc(const BasebandSignal& x, const ModuloAdcConfig& cfg)
{
    return modulo_adc_impl(x, cfg, false);
}

BasebandSignal conventional_adc(const BasebandSignal& x, double span, std::optional<int> bits)
{
    return conventional_impl(x, span, bits, false);
}

}  // namespace serial

}  // namespace usfd
