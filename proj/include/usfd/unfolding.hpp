#pragma once

#include <span>
#include <stdexcept>
#include <string>

#include "usfd/signal.hpp"

namespace usfd {

class RecoveryError : public std::runtime_error {
public:
    explicit RecoveryError(const std::string& what) : std::runtime_error(what) {}
};

struct UnfoldingConfig {
    int order = 1;               // L
    double lambda = 1.0;
    double beta = 1.0;           // amplitude bound, a multiple of 2 lambda
    double sample_interval = 1.0;
    double bandwidth = 0.0;      // Omega, rad/s
    int alpha = 0;               // optional oversampling exponent, T <= 1 / (2^alpha Omega e)

    /// T * Omega * e
    double oversampling_ratio() const;
    void validate() const;
};

/// Delta^L x, length len(x) - L.
RealVec finite_difference(std::span<const double> x, int order = 1);
/// Running sum: out[k] = s[0] + ... + s[k].
RealVec anti_difference(std::span<const double> s);

/// Smallest L >= max(1, ceil((log lambda - log beta) / log(T Omega e))) with (T Omega e)^L < zeta.
int choose_order(const UnfoldingConfig& cfg, double zeta);

/// Smallest multiple of 2 lambda that is >= peak.
double beta_for_peak(double peak, double lambda);

/// Unfolds one real rail. The residue is rebuilt stage by stage from
/// M(Delta^L y) - Delta^L y, snapping to 2 lambda Z after every running sum.
/// Output has the same length as the input. Throws RecoveryError when a
/// snap residual exceeds lambda / 2 or no integration constant fits beta.
RealVec usf_recover(std::span<const double> folded, const UnfoldingConfig& cfg);

/// Rail-wise recovery of a complex signal.
BasebandSignal usf_recover(const BasebandSignal& folded, const UnfoldingConfig& cfg);

}  // namespace usfd
