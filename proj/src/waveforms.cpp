#include "usfd/waveforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "usfd/dft.hpp"
#include "usfd/rng.hpp"

namespace usfd {

namespace {

constexpr double kPi = std::numbers::pi;

double rrc_value(double t, double beta)
{
    if (std::abs(t) < 1e-12) {
        return 1.0 - beta + 4.0 * beta / kPi;
    }
    if (beta > 0.0 && std::abs(std::abs(t) - 1.0 / (4.0 * beta)) < 1e-12) {
        const double a = kPi / (4.0 * beta);
        return beta / std::numbers::sqrt2 *
               ((1.0 + 2.0 / kPi) * std::sin(a) + (1.0 - 2.0 / kPi) * std::cos(a));
    }
    const double num = std::sin(kPi * t * (1.0 - beta)) + 4.0 * beta * t * std::cos(kPi * t * (1.0 + beta));
    const double den = kPi * t * (1.0 - (4.0 * beta * t) * (4.0 * beta * t));
    return num / den;
}

std::size_t next_pow2(std::size_t n)
{
    std::size_t p = 1;
    while (p < n) {
        p <<= 1;
    }
    return p;
}

// Signed frequency index of DFT bin n for an N-point transform.
double signed_bin(std::size_t n, std::size_t size)
{
    return 2 * n < size ? static_cast<double>(n) : static_cast<double>(n) - static_cast<double>(size);
}

}  // namespace

RealVec pulse_taps(const PulseShape& pulse, int samples_per_symbol)
{
    if (samples_per_symbol < 1) {
        throw std::invalid_argument("pulse_taps: samples_per_symbol must be >= 1");
    }
    if (pulse.kind == PulseKind::Rectangular) {
        return RealVec(static_cast<std::size_t>(samples_per_symbol), 1.0);
    }
    if (pulse.rolloff < 0.0 || pulse.rolloff > 1.0 || pulse.span_symbols < 1) {
        throw std::invalid_argument("pulse_taps: rolloff must be in [0,1] and span >= 1");
    }
    const int half = pulse.span_symbols * samples_per_symbol / 2;
    RealVec taps(static_cast<std::size_t>(2 * half + 1));
    double energy = 0.0;
    for (int k = -half; k <= half; ++k) {
        const double v = rrc_value(static_cast<double>(k) / samples_per_symbol, pulse.rolloff);
        taps[static_cast<std::size_t>(k + half)] = v;
        energy += v * v;
    }
    const double scale = std::sqrt(samples_per_symbol / energy);
    for (auto& v : taps) {
        v *= scale;
    }
    return taps;
}

std::size_t matched_filter_lag(const PulseShape& pulse, int samples_per_symbol)
{
    return pulse_taps(pulse, samples_per_symbol).size() - 1;
}

double pulse_bandwidth(const PulseShape& pulse, double symbol_period)
{
    if (!(symbol_period > 0.0)) {
        throw std::invalid_argument("pulse_bandwidth: symbol period must be positive");
    }
    if (pulse.kind == PulseKind::Rectangular) {
        return 2.0 * kPi / symbol_period;
    }
    return kPi * (1.0 + pulse.rolloff) / symbol_period;
}

ComplexVec qpsk_modulate(std::span<const std::uint8_t> bits)
{
    if (bits.size() % 2 != 0) {
        throw std::invalid_argument("qpsk_modulate: bit count must be even");
    }
    const double s = 1.0 / std::numbers::sqrt2;
    ComplexVec out(bits.size() / 2);
    for (std::size_t n = 0; n < out.size(); ++n) {
        const double i = bits[2 * n] ? -1.0 : 1.0;
        const double q = bits[2 * n + 1] ? -1.0 : 1.0;
        out[n] = {i * s, q * s};
    }
    return out;
}

BitVec random_bits(std::size_t count, std::uint64_t seed)
{
    Rng rng(seed);
    BitVec out(count);
    for (auto& b : out) {
        b = static_cast<std::uint8_t>(rng() >> 63);
    }
    return out;
}

BasebandSignal pulse_shape(std::span<const Complex> symbols, int samples_per_symbol,
                           const PulseShape& pulse, double symbol_period)
{
    if (symbols.empty()) {
        throw std::invalid_argument("pulse_shape: empty symbol sequence");
    }
    const RealVec taps = pulse_taps(pulse, samples_per_symbol);
    const auto sps = static_cast<std::size_t>(samples_per_symbol);
    const std::size_t out_len = (symbols.size() - 1) * sps + taps.size();
    const std::size_t nfft = next_pow2(out_len);

    ComplexVec up(nfft, 0.0);
    for (std::size_t n = 0; n < symbols.size(); ++n) {
        up[n * sps] = symbols[n];
    }
    ComplexVec h(nfft, 0.0);
    std::copy(taps.begin(), taps.end(), h.begin());
    ComplexVec U = fft(up);
    const ComplexVec H = fft(h);
    for (std::size_t n = 0; n < nfft; ++n) {
        U[n] *= H[n];
    }
    ComplexVec y = ifft(U);
    y.resize(out_len);
    return {std::move(y), symbol_period / samples_per_symbol, pulse_bandwidth(pulse, symbol_period)};
}

double PilotSpec::fundamental() const { return 2.0 * kPi / period; }

Complex PilotSpec::coefficient(int p) const
{
    if (p < -harmonics || p > harmonics) {
        return 0.0;
    }
    return coefficients[static_cast<std::size_t>(p + harmonics)];
}

void PilotSpec::validate() const
{
    if (!(period > 0.0)) {
        throw std::invalid_argument("PilotSpec: period must be positive");
    }
    if (harmonics < 0) {
        throw std::invalid_argument("PilotSpec: negative harmonic count");
    }
    if (coefficients.size() != static_cast<std::size_t>(2 * harmonics + 1)) {
        throw std::invalid_argument("PilotSpec: coefficient count must be 2P+1");
    }
    if (sample_count < 2 * harmonics + 1) {
        throw std::invalid_argument("PilotSpec: sample_count must be >= 2P+1");
    }
    double scale = 0.0;
    for (const auto& c : coefficients) {
        scale = std::max(scale, std::abs(c));
    }
    for (int p = 0; p <= harmonics; ++p) {
        if (std::abs(coefficient(-p) - std::conj(coefficient(p))) > 1e-12 * std::max(scale, 1.0)) {
            throw std::invalid_argument("PilotSpec: coefficients are not conjugate symmetric");
        }
    }
}

PilotSpec make_random_pilot(int harmonics, int sample_count, double period, double amplitude,
                            std::uint64_t seed)
{
    PilotSpec spec;
    spec.period = period;
    spec.harmonics = harmonics;
    spec.sample_count = sample_count;
    spec.coefficients.assign(static_cast<std::size_t>(2 * harmonics + 1), 0.0);
    Rng rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    for (int p = 1; p <= harmonics; ++p) {
        const Complex c = std::polar(amplitude, phase(rng));
        spec.coefficients[static_cast<std::size_t>(harmonics + p)] = c;
        spec.coefficients[static_cast<std::size_t>(harmonics - p)] = std::conj(c);
    }
    spec.validate();
    return spec;
}

BasebandSignal generate_pilot(const PilotSpec& spec, double sample_interval)
{
    spec.validate();
    if (std::abs(sample_interval * spec.sample_count - spec.period) > 1e-9 * spec.period) {
        throw std::invalid_argument("generate_pilot: K*T must equal the pilot period");
    }
    return sample_pilot(spec, static_cast<std::size_t>(spec.sample_count));
}

BasebandSignal sample_pilot(const PilotSpec& spec, std::size_t count, double delay, double gain)
{
    spec.validate();
    const double T = spec.sample_interval();
    const double w0 = spec.fundamental();
    const auto K = static_cast<std::size_t>(spec.sample_count);
    ComplexVec out(count, 0.0);
    for (int p = -spec.harmonics; p <= spec.harmonics; ++p) {
        const Complex c = spec.coefficient(p) * gain * std::polar(1.0, -p * w0 * delay);
        if (c == 0.0) {
            continue;
        }
        for (std::size_t k = 0; k < count; ++k) {
            // k mod K keeps the phase argument bounded for long captures
            const double kk = static_cast<double>(k % K);
            out[k] += c * std::polar(1.0, p * w0 * kk * T);
        }
    }
    const double bw = std::max(spec.harmonics, 1) * w0;
    return {std::move(out), T, bw};
}

BasebandSignal apply_sparse_channel(const BasebandSignal& x, const SparseChannel& channel,
                                    double power)
{
    const std::size_t n = x.size();
    const double T = x.sample_interval();
    const double span = static_cast<double>(n) * T;
    if (!(channel.delay >= 0.0) || channel.delay >= span) {
        throw std::invalid_argument("apply_sparse_channel: delay outside [0, N*T)");
    }
    if (power < 0.0) {
        throw std::invalid_argument("apply_sparse_channel: negative power");
    }
    const double gain = std::sqrt(power) * channel.amplitude;
    const double d = channel.delay / T;
    const double di = std::round(d);
    ComplexVec out(n);
    if (std::abs(d - di) < 1e-9) {
        const auto shift = static_cast<std::size_t>(di) % n;
        for (std::size_t k = 0; k < n; ++k) {
            out[k] = gain * x.samples()[(k + n - shift) % n];
        }
        return x.with_samples(std::move(out));
    }
    ComplexVec X = fft(x.samples());
    for (std::size_t b = 0; b < n; ++b) {
        if (2 * b == n) {
            X[b] *= std::cos(kPi * d);  // Nyquist bin: symmetric split keeps real inputs real
        } else {
            X[b] *= std::polar(1.0, -2.0 * kPi * signed_bin(b, n) * d / static_cast<double>(n));
        }
    }
    out = ifft(X);
    for (auto& v : out) {
        v *= gain;
    }
    return x.with_samples(std::move(out));
}

ComplexVec complex_gaussian(std::size_t count, double variance, std::uint64_t seed)
{
    Rng rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(variance / 2.0));
    ComplexVec out(count);
    for (auto& v : out) {
        const double re = g(rng);
        const double im = g(rng);
        v = {re, im};
    }
    return out;
}

Mixture compose_mixture(const BasebandSignal& soi, const BasebandSignal& si, const MixtureConfig& cfg)
{
    if (soi.size() != si.size()) {
        throw std::invalid_argument("compose_received: length mismatch");
    }
    if (std::abs(soi.sample_interval() - si.sample_interval()) > 1e-12 * soi.sample_interval()) {
        throw std::invalid_argument("compose_received: sample interval mismatch");
    }
    if (cfg.p_u < 0.0 || cfg.p_d < 0.0) {
        throw std::invalid_argument("compose_received: negative power");
    }
    const std::size_t n = soi.size();
    ComplexVec s(n), i(n);
    const double gu = std::sqrt(cfg.p_u);
    const double gd = std::sqrt(cfg.p_d);
    for (std::size_t k = 0; k < n; ++k) {
        s[k] = gu * soi.samples()[k];
        i[k] = gd * si.samples()[k];
    }
    const double p_soi = mean_power(s);
    if (cfg.sir_db) {
        const double p_si = mean_power(i);
        if (p_si == 0.0 || p_soi == 0.0) {
            throw std::invalid_argument("compose_received: SIR undefined for zero-power terms");
        }
        const double target = p_soi / std::pow(10.0, *cfg.sir_db / 10.0);
        const double g = std::sqrt(target / p_si);
        for (auto& v : i) {
            v *= g;
        }
    }
    ComplexVec noise(n, 0.0);
    if (cfg.snr_db) {
        const double ref = cfg.noise_reference_power.value_or(p_soi);
        if (!(ref > 0.0)) {
            throw std::invalid_argument("compose_received: SNR needs a positive reference power");
        }
        noise = complex_gaussian(n, ref / std::pow(10.0, *cfg.snr_db / 10.0), cfg.seed);
    }
    ComplexVec z(n);
    for (std::size_t k = 0; k < n; ++k) {
        z[k] = s[k] + i[k] + noise[k];
    }
    return {soi.with_samples(std::move(z)), std::move(s), std::move(i), std::move(noise)};
}

BasebandSignal compose_received(const BasebandSignal& soi, const BasebandSignal& si,
                                const MixtureConfig& cfg)
{
    return compose_mixture(soi, si, cfg).received;
}

}  // namespace usfd
