#include "usfd/sic.hpp"

#include <cmath>
#include <stdexcept>

namespace usfd {

double bit_error_rate(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b)
{
    if (a.size() != b.size()) {
        throw std::invalid_argument("bit_error_rate: length mismatch");
    }
    if (a.empty()) {
        throw std::invalid_argument("bit_error_rate: no bits");
    }
    std::size_t errors = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        errors += (a[k] != 0) != (b[k] != 0) ? 1 : 0;
    }
    return static_cast<double>(errors) / static_cast<double>(a.size());
}

MetricSet compute_metrics(std::span<const Complex> estimate, std::span<const Complex> truth,
                          std::span<const std::uint8_t> bits_est, std::span<const std::uint8_t> bits_true)
{
    if (estimate.size() != truth.size()) {
        throw std::invalid_argument("compute_metrics: length mismatch");
    }
    double err = 0.0;
    double ref = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        err += std::norm(estimate[k] - truth[k]);
        ref += std::norm(truth[k]);
    }
    if (!(ref > 0.0)) {
        throw std::invalid_argument("compute_metrics: zero-energy truth");
    }
    MetricSet m;
    m.mse = err / static_cast<double>(truth.size());
    m.nmse = err / ref;
    m.sic_db = 10.0 * std::log10(ref / err);
    m.ber = bits_true.empty() && bits_est.empty() ? 0.0 : bit_error_rate(bits_est, bits_true);
    return m;
}

BasebandSignal reconstruct_si(const SparseChannel& channel, const BasebandSignal& tx_reference, double power)
{
    return apply_sparse_channel(tx_reference, channel, power);
}

SicResult cancel_si(const BasebandSignal& recovered, const BasebandSignal& si_hat,
                    std::optional<std::span<const Complex>> si_truth)
{
    if (recovered.size() != si_hat.size()) {
        throw std::invalid_argument("cancel_si: length mismatch");
    }
    ComplexVec soi(recovered.size());
    for (std::size_t k = 0; k < soi.size(); ++k) {
        soi[k] = recovered.samples()[k] - si_hat.samples()[k];
    }
    SicResult r{si_hat, recovered.with_samples(std::move(soi)), 0.0, std::nullopt, std::nullopt};
    if (si_truth) {
        if (si_truth->size() != recovered.size()) {
            throw std::invalid_argument("cancel_si: truth length mismatch");
        }
        r.residual_si_power = mean_squared_error(*si_truth, si_hat.samples());
        r.residual_si_power_db = 10.0 * std::log10(r.residual_si_power);
        const double p_si = mean_power(*si_truth);
        if (p_si > 0.0) {
            r.sic_db = 10.0 * std::log10(p_si / r.residual_si_power);
        }
    }
    return r;
}

BitVec qpsk_detect(const BasebandSignal& r_soi, const SparseChannel& h_u, int samples_per_symbol,
                   const PulseShape& pulse)
{
    if (h_u.amplitude == 0.0) {
        throw std::invalid_argument("qpsk_detect: zero uplink gain");
    }
    const RealVec taps = pulse_taps(pulse, samples_per_symbol);
    const auto sps = static_cast<std::size_t>(samples_per_symbol);
    const std::size_t n = r_soi.size();
    if (n < taps.size()) {
        throw std::invalid_argument("qpsk_detect: signal shorter than the pulse");
    }
    const std::size_t symbols = (n - taps.size()) / sps + 1;
    const double norm = 1.0 / static_cast<double>(samples_per_symbol);
    // uplink delay is assumed known (perfect synchronisation); only whole samples are compensated
    const double T = r_soi.sample_interval();
    const auto shift = static_cast<std::size_t>(std::llround(h_u.delay / T));
    const auto& r = r_soi.samples();
    BitVec bits(2 * symbols);
    for (std::size_t s = 0; s < symbols; ++s) {
        // matched-filter output at its peak for symbol s
        Complex acc = 0.0;
        for (std::size_t i = 0; i < taps.size(); ++i) {
            const std::size_t k = s * sps + i + shift;
            if (k < n) {
                acc += r[k] * taps[i];
            }
        }
        const Complex est = acc * norm / h_u.amplitude;
        bits[2 * s] = est.real() < 0.0 ? 1 : 0;
        bits[2 * s + 1] = est.imag() < 0.0 ? 1 : 0;
    }
    return bits;
}

}  // namespace usfd
