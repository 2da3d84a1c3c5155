#include <stdexcept>

#include "usfd/sic.hpp"

namespace usfd {

BasebandSignal nlms_estimate(const BasebandSignal& tx_reference, const BasebandSignal& received,
                             const NlmsConfig& cfg)
{
    if (cfg.order < 1) {
        throw std::invalid_argument("nlms_estimate: order must be >= 1");
    }
    if (cfg.step < 0.0 || cfg.step > 2.0) {
        throw std::invalid_argument("nlms_estimate: step must lie in [0, 2]");
    }
    if (!(cfg.regularizer > 0.0)) {
        throw std::invalid_argument("nlms_estimate: regularizer must be positive");
    }
    if (tx_reference.size() != received.size()) {
        throw std::invalid_argument("nlms_estimate: length mismatch");
    }
    const auto& x = tx_reference.samples();
    const auto& d = received.samples();
    const auto L = static_cast<std::size_t>(cfg.order);
    ComplexVec w(L, 0.0);
    ComplexVec u(L, 0.0);  // u[i] = x[k - i]
    double energy = 0.0;
    ComplexVec y(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        energy -= std::norm(u[L - 1]);
        for (std::size_t i = L - 1; i > 0; --i) {
            u[i] = u[i - 1];
        }
        u[0] = x[k];
        energy += std::norm(u[0]);
        if (energy < 0.0) {
            energy = 0.0;
        }
        Complex out = 0.0;
        for (std::size_t i = 0; i < L; ++i) {
            out += std::conj(w[i]) * u[i];
        }
        y[k] = out;
        const Complex e = d[k] - out;
        const double g = cfg.step / (cfg.regularizer + energy);
        for (std::size_t i = 0; i < L; ++i) {
            w[i] += g * u[i] * std::conj(e);
        }
    }
    return received.with_samples(std::move(y));
}

}  // namespace usfd
