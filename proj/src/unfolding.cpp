#include "usfd/unfolding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "usfd/frontend.hpp"

namespace usfd {

double UnfoldingConfig::oversampling_ratio() const
{
    return sample_interval * bandwidth * std::numbers::e;
}

void UnfoldingConfig::validate() const
{
    if (order < 1) {
        throw std::invalid_argument("UnfoldingConfig: order must be >= 1");
    }
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("UnfoldingConfig: lambda must be positive");
    }
    if (!(beta >= lambda)) {
        throw std::invalid_argument("UnfoldingConfig: beta must be >= lambda");
    }
    const double m = beta / (2.0 * lambda);
    if (std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, m) && std::abs(beta - lambda) > 1e-12 * lambda) {
        throw std::invalid_argument("UnfoldingConfig: beta must be a multiple of 2 lambda");
    }
    if (!(sample_interval > 0.0)) {
        throw std::invalid_argument("UnfoldingConfig: sample interval must be positive");
    }
    if (alpha > 0 && bandwidth > 0.0 &&
        sample_interval > 1.0 / (std::ldexp(1.0, alpha) * bandwidth * std::numbers::e) * (1.0 + 1e-12)) {
        throw std::invalid_argument("UnfoldingConfig: T exceeds 1/(2^alpha Omega e)");
    }
}

RealVec finite_difference(std::span<const double> x, int order)
{
    if (order < 0) {
        throw std::invalid_argument("finite_difference: negative order");
    }
    if (x.size() <= static_cast<std::size_t>(order)) {
        throw std::invalid_argument("finite_difference: sequence shorter than order + 1");
    }
    RealVec d(x.begin(), x.end());
    for (int j = 0; j < order; ++j) {
        for (std::size_t k = 0; k + 1 < d.size(); ++k) {
            d[k] = d[k + 1] - d[k];
        }
        d.pop_back();
    }
    return d;
}

RealVec anti_difference(std::span<const double> s)
{
    RealVec out(s.size());
    std::partial_sum(s.begin(), s.end(), out.begin());
    return out;
}

int choose_order(const UnfoldingConfig& cfg, double zeta)
{
    const double c = cfg.oversampling_ratio();
    if (!(c > 0.0) || c >= 1.0) {
        throw std::invalid_argument("choose_order: T*Omega*e must lie in (0, 1)");
    }
    if (!(zeta > 0.0)) {
        throw std::invalid_argument("choose_order: zeta must be positive");
    }
    if (cfg.lambda > cfg.beta) {
        throw std::invalid_argument("choose_order: lambda must not exceed beta");
    }
    const double bound = (std::log(cfg.lambda) - std::log(cfg.beta)) / std::log(c);
    int L = std::max(1, static_cast<int>(std::ceil(bound - 1e-12)));
    while (std::pow(c, L) >= zeta) {
        ++L;
        if (L > 64) {
            throw std::invalid_argument("choose_order: no order below 64 meets the zeta constraint");
        }
    }
    return L;
}

double beta_for_peak(double peak, double lambda)
{
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("beta_for_peak: lambda must be positive");
    }
    const double m = std::max(1.0, std::ceil(peak / (2.0 * lambda) - 1e-12));
    return 2.0 * lambda * m;
}

namespace {

double snap(double v, double lambda, int stage)
{
    const double lattice = 2.0 * lambda * std::round(v / (2.0 * lambda));
    if (std::abs(v - lattice) > lambda / 2.0) {
        std::ostringstream msg;
        msg << "usf_recover: lattice snap residual " << std::abs(v - lattice) << " exceeds lambda/2 at stage "
            << stage;
        throw RecoveryError(msg.str());
    }
    return lattice;
}

}  // namespace

RealVec usf_recover(std::span<const double> folded, const UnfoldingConfig& cfg)
{
    cfg.validate();
    const int L = cfg.order;
    const double lambda = cfg.lambda;
    const std::size_t n = folded.size();
    if (n <= static_cast<std::size_t>(L)) {
        throw std::invalid_argument("usf_recover: frame shorter than order + 1");
    }

    // Delta^L eps = M(Delta^L y) - Delta^L y, exactly on the lattice.
    RealVec eps = finite_difference(folded, L);
    for (auto& v : eps) {
        const double f = modulo_fold(v, lambda);
        v = snap(f - v, lambda, L);
    }

    for (int j = L - 1; j >= 0; --j) {
        const std::size_t len = n - static_cast<std::size_t>(j);
        RealVec u(len, 0.0);
        for (std::size_t k = 1; k < len; ++k) {
            u[k] = snap(u[k - 1] + eps[k - 1], lambda, j);
        }
        double c = 0.0;
        if (j >= 1) {
            // mean(Delta^j r) telescopes to O(beta / len); everything else is known.
            const RealVec dy = finite_difference(folded, j);
            double acc = 0.0;
            for (std::size_t k = 0; k < len; ++k) {
                acc += u[k] + dy[k];
            }
            c = snap(-acc / static_cast<double>(len), lambda, j);
        } else {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (std::size_t k = 0; k < len; ++k) {
                lo = std::min(lo, folded[k] + u[k]);
                hi = std::max(hi, folded[k] + u[k]);
            }
            // shifts 2 lambda m keeping every sample within beta + lambda
            const double limit = cfg.beta + lambda;
            const double m_lo = std::ceil((-limit - lo) / (2.0 * lambda));
            const double m_hi = std::floor((limit - hi) / (2.0 * lambda));
            if (m_lo > m_hi) {
                throw RecoveryError("usf_recover: no integration constant satisfies the amplitude bound");
            }
            const double m = std::clamp(0.0, m_lo, m_hi);
            c = 2.0 * lambda * m;
        }
        for (auto& v : u) {
            v += c;
        }
        eps = std::move(u);
    }

    RealVec out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = folded[k] + eps[k];
    }
    return out;
}

BasebandSignal usf_recover(const BasebandSignal& folded, const UnfoldingConfig& cfg)
{
    const RealVec i = usf_recover(std::span<const double>(folded.in_phase()), cfg);
    const RealVec q = usf_recover(std::span<const double>(folded.quadrature()), cfg);
    return BasebandSignal::from_rails(i, q, folded.sample_interval(), folded.bandwidth());
}

}  // namespace usfd
