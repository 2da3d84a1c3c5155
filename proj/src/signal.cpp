#include "usfd/signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace usfd {

BasebandSignal::BasebandSignal(ComplexVec samples, double sample_interval, double bandwidth)
    : samples_(std::move(samples)), sample_interval_(sample_interval), bandwidth_(bandwidth)
{
    if (samples_.empty()) {
        throw std::invalid_argument("BasebandSignal: empty sample sequence");
    }
    if (!(sample_interval_ > 0.0) || !std::isfinite(sample_interval_)) {
        throw std::invalid_argument("BasebandSignal: sample interval must be positive");
    }
    if (!(bandwidth_ > 0.0) || !std::isfinite(bandwidth_)) {
        throw std::invalid_argument("BasebandSignal: bandwidth must be positive");
    }
}

BasebandSignal BasebandSignal::from_rails(std::span<const double> in_phase,
                                          std::span<const double> quadrature,
                                          double sample_interval, double bandwidth)
{
    if (in_phase.size() != quadrature.size()) {
        throw std::invalid_argument("BasebandSignal: rail length mismatch");
    }
    ComplexVec s(in_phase.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        s[k] = {in_phase[k], quadrature[k]};
    }
    return {std::move(s), sample_interval, bandwidth};
}

RealVec BasebandSignal::in_phase() const
{
    RealVec out(samples_.size());
    std::transform(samples_.begin(), samples_.end(), out.begin(),
                   [](const Complex& c) { return c.real(); });
    return out;
}

RealVec BasebandSignal::quadrature() const
{
    RealVec out(samples_.size());
    std::transform(samples_.begin(), samples_.end(), out.begin(),
                   [](const Complex& c) { return c.imag(); });
    return out;
}

double BasebandSignal::power() const { return mean_power(samples_); }

double BasebandSignal::rail_peak() const { return usfd::rail_peak(samples_); }

BasebandSignal BasebandSignal::with_samples(ComplexVec samples) const
{
    return {std::move(samples), sample_interval_, bandwidth_};
}

double mean_power(std::span<const Complex> x)
{
    if (x.empty()) {
        return 0.0;
    }
    double acc = 0.0;
    for (const auto& v : x) {
        acc += std::norm(v);
    }
    return acc / static_cast<double>(x.size());
}

double rail_peak(std::span<const Complex> x)
{
    double peak = 0.0;
    for (const auto& v : x) {
        peak = std::max({peak, std::abs(v.real()), std::abs(v.imag())});
    }
    return peak;
}

double mean_squared_error(std::span<const Complex> a, std::span<const Complex> b)
{
    if (a.size() != b.size()) {
        throw std::invalid_argument("mean_squared_error: length mismatch");
    }
    if (a.empty()) {
        return 0.0;
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        acc += std::norm(a[k] - b[k]);
    }
    return acc / static_cast<double>(a.size());
}

}  // namespace usfd
