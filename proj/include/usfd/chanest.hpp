#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "usfd/signal.hpp"
#include "usfd/waveforms.hpp"

namespace usfd {

class EstimationError : public std::runtime_error {
public:
    explicit EstimationError(const std::string& what) : std::runtime_error(what) {}
};

/// Residue of a folded frame as spikes of the first difference:
/// Delta eps[locations[m]] = amplitudes[m], each amplitude in 2 lambda Z.
struct FoldModel {
    RealVec amplitudes;
    RealVec locations;  // sample index of the spike in Delta eps

    std::size_t count() const { return amplitudes.size(); }
};

/// DFT of the first difference of a K-sample frame (DFT size K-1) with the
/// in-band set E = {0..P} u {K-1-P..K-2} and its complement.
struct SpectralFrame {
    ComplexVec bins;
    int harmonics = 0;
    std::vector<int> inband;
    std::vector<int> outband;  // contiguous, P+1 .. K-2-P

    std::size_t size() const { return bins.size(); }
};

SpectralFrame difference_dft(std::span<const double> folded, int harmonics);

/// Model order from the singular values of the (floor(n/2)+1)-row Hankel
/// matrix of z: position of the largest relative gap, with singular values
/// clamped below at max(1e-8 sigma_max, noise_floor).
int estimate_fold_count(std::span<const Complex> z, double noise_floor = 0.0);

/// Spectral norm expected from a Hankel matrix of differenced-noise DFT bins:
/// 2 sqrt(N) sigma (sqrt(rows) + sqrt(cols)).
double hankel_noise_floor(std::size_t rows, std::size_t cols, std::size_t dft_size, double sigma);

/// z[n] = sum_m a_m u_m^n fitted with an annihilating filter (TLS null vector),
/// companion-matrix roots and least-squares amplitudes.
struct ExponentialFit {
    ComplexVec roots;
    ComplexVec amplitudes;
};
ExponentialFit prony_fit(std::span<const Complex> z, int order);

/// Where z sits in the DFT: z[i] is bin first_bin + i of a frame_size-point DFT.
struct BinLayout {
    int first_bin = 0;
    int frame_size = 0;
};

/// Fits z[i] = sum_m mu_m e^{-j 2 pi (first_bin + i) nu_m / N}. Locations are
/// taken as the M grid points where the annihilating filter response is
/// smallest, amplitudes are refit by least squares and snapped to 2 lambda Z
/// (zeros dropped). A rank-deficient Hankel lowers M by one once; a second
/// failure throws EstimationError.
FoldModel prony(std::span<const Complex> z, int order, const BinLayout& layout, double lambda,
                double noise_floor = 0.0);

/// E[n] = sum_m mu_m e^{-j 2 pi n nu_m / N}, n = 0..N-1 (the DFT of Delta eps).
ComplexVec reconstruct_residue_spectrum(const FoldModel& folds, int frame_size);

struct ChannelEstimateOptions {
    std::optional<int> fold_count;   // unset = estimated
    double noise_sigma = 0.0;        // per-sample noise std on the folded samples
    double min_bin_ratio = 1e-9;     // pilot bins below this fraction of the largest are skipped
    double max_amplitude_spread = 0.5;  // coefficient of variation of |d| beyond which the fit is rejected
};

struct ChannelEstimate {
    SparseChannel channel;
    FoldModel folds;
    int fold_count = 0;       // model order fed to Prony
    ComplexVec ratios;        // d[p] for p = -P..P (0 where unusable), index p + P
    SpectralFrame frame;
};

/// Pilot-phase estimate of A and tau from N + 1 folded samples of the received
/// pilot (N = pilot.sample_count), or N samples closed circularly.
ChannelEstimate estimate_si_channel(std::span<const double> folded_pilot, const PilotSpec& pilot,
                                    double lambda, const ChannelEstimateOptions& options = {});

/// sum_{|p|<=P} |A_hat e^{-jp w0 tau_hat} - A e^{-jp w0 tau}|^2 / ((2P+1) A^2).
double channel_nmse(const SparseChannel& estimate, const SparseChannel& truth, const PilotSpec& pilot);

}  // namespace usfd
