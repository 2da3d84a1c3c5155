#include "usfd/chanest.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "usfd/dft.hpp"

namespace usfd {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_phase(double a)
{
    return std::remainder(a, 2.0 * kPi);
}

}  // namespace

SpectralFrame difference_dft(std::span<const double> folded, int harmonics)
{
    if (harmonics < 0) {
        throw std::invalid_argument("difference_dft: negative harmonic count");
    }
    const std::size_t K = folded.size();
    if (K < static_cast<std::size_t>(2 * harmonics + 2)) {
        throw std::invalid_argument("difference_dft: frame needs K >= 2P + 2 samples");
    }
    const std::size_t N = K - 1;
    ComplexVec d(N);
    for (std::size_t k = 0; k < N; ++k) {
        d[k] = folded[k + 1] - folded[k];
    }
    SpectralFrame f;
    f.bins = fft(d);
    f.harmonics = harmonics;
    const int n = static_cast<int>(N);
    for (int b = 0; b < n; ++b) {
        if (b <= harmonics || b >= n - harmonics) {
            f.inband.push_back(b);
        } else {
            f.outband.push_back(b);
        }
    }
    return f;
}

double hankel_noise_floor(std::size_t rows, std::size_t cols, std::size_t dft_size, double sigma)
{
    return 2.0 * std::sqrt(static_cast<double>(dft_size)) * sigma *
           (std::sqrt(static_cast<double>(rows)) + std::sqrt(static_cast<double>(cols)));
}

int estimate_fold_count(std::span<const Complex> z, double noise_floor)
{
    const std::size_t n = z.size();
    if (n < 4) {
        throw std::invalid_argument("estimate_fold_count: need at least 4 samples");
    }
    const std::size_t rows = n / 2 + 1;
    const std::size_t cols = n - rows + 1;
    Eigen::MatrixXcd H(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t l = 0; l < cols; ++l) {
            H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) = z[i + l];
        }
    }
    const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXcd>(H).singularValues();
    const auto count = static_cast<int>(s.size());
    const int cap = static_cast<int>(n / 2) - 1;
    double zscale = 0.0;
    for (const auto& v : z) {
        zscale = std::max(zscale, std::abs(v));
    }
    if (s(0) <= 1e-12 * std::max(1.0, zscale) || s(0) <= noise_floor) {
        return 0;
    }
    const double floor = std::max(1e-8 * s(0), noise_floor);
    int best = 0;
    double best_gap = 0.0;
    for (int i = 0; i + 1 < count; ++i) {
        const double gap = std::max(s(i), floor) / std::max(s(i + 1), floor);
        if (gap > best_gap) {
            best_gap = gap;
            best = i + 1;
        }
    }
    return std::min(best, cap);
}

ComplexVec reconstruct_residue_spectrum(const FoldModel& folds, int frame_size)
{
    if (frame_size < 1) {
        throw std::invalid_argument("reconstruct_residue_spectrum: frame size must be positive");
    }
    ComplexVec E(static_cast<std::size_t>(frame_size), 0.0);
    for (std::size_t m = 0; m < folds.count(); ++m) {
        const double nu = folds.locations[m];
        for (int n = 0; n < frame_size; ++n) {
            E[static_cast<std::size_t>(n)] +=
                folds.amplitudes[m] * std::polar(1.0, -2.0 * kPi * std::fmod(n * nu, frame_size) / frame_size);
        }
    }
    return E;
}

ChannelEstimate estimate_si_channel(std::span<const double> folded_pilot, const PilotSpec& pilot,
                                    double lambda, const ChannelEstimateOptions& options)
{
    pilot.validate();
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("estimate_si_channel: lambda must be positive");
    }
    const int N = pilot.sample_count;
    const int P = pilot.harmonics;
    RealVec frame(folded_pilot.begin(), folded_pilot.end());
    if (frame.size() == static_cast<std::size_t>(N)) {
        frame.push_back(frame.front());
    }
    if (frame.size() != static_cast<std::size_t>(N) + 1) {
        throw std::invalid_argument("estimate_si_channel: expected N or N+1 pilot samples");
    }

    ChannelEstimate est;
    est.frame = difference_dft(frame, P);
    const auto& Y = est.frame.bins;

    // out-of-band bins carry only the residue: z = -Y = DFT(Delta eps)
    ComplexVec z;
    z.reserve(est.frame.outband.size());
    for (int b : est.frame.outband) {
        z.push_back(-Y[static_cast<std::size_t>(b)]);
    }
    const BinLayout layout{P + 1, N};
    if (options.fold_count) {
        est.fold_count = *options.fold_count;
    } else if (z.size() >= 4) {
        const std::size_t rows = z.size() / 2 + 1;
        const double floor = options.noise_sigma > 0.0
                                 ? hankel_noise_floor(rows, z.size() - rows + 1, N, options.noise_sigma)
                                 : 0.0;
        est.fold_count = estimate_fold_count(z, floor);
    } else {
        est.fold_count = 0;
    }
    if (est.fold_count > 0) {
        if (z.size() < static_cast<std::size_t>(2 * est.fold_count)) {
            throw EstimationError("estimate_si_channel: too few out-of-band bins for the fold count");
        }
        double floor = 0.0;
        if (options.noise_sigma > 0.0) {
            floor = hankel_noise_floor(z.size() - static_cast<std::size_t>(est.fold_count),
                                       static_cast<std::size_t>(est.fold_count) + 1, N, options.noise_sigma);
        }
        est.folds = prony(z, est.fold_count, layout, lambda, floor);
    }

    const ComplexVec E = reconstruct_residue_spectrum(est.folds, N);

    // d[p] = R[p] / Gamma_Delta[p], Gamma_Delta[p] = N gamma_p (e^{j 2 pi p / N} - 1)
    est.ratios.assign(static_cast<std::size_t>(2 * P + 1), 0.0);
    std::vector<Complex> gamma(static_cast<std::size_t>(2 * P + 1), 0.0);
    double gmax = 0.0;
    for (int p = -P; p <= P; ++p) {
        const Complex g = static_cast<double>(N) * pilot.coefficient(p) *
                          (std::polar(1.0, 2.0 * kPi * p / N) - 1.0);
        gamma[static_cast<std::size_t>(p + P)] = g;
        gmax = std::max(gmax, std::abs(g));
    }
    std::vector<bool> usable(static_cast<std::size_t>(2 * P + 1), false);
    int n_usable = 0;
    for (int p = -P; p <= P; ++p) {
        const auto i = static_cast<std::size_t>(p + P);
        if (p == 0 || std::abs(gamma[i]) <= options.min_bin_ratio * gmax) {
            continue;
        }
        const auto bin = static_cast<std::size_t>((p + N) % N);
        est.ratios[i] = (Y[bin] + E[bin]) / gamma[i];
        usable[i] = true;
        ++n_usable;
    }
    if (n_usable < 2) {
        throw EstimationError("estimate_si_channel: fewer than 2 usable pilot bins");
    }

    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < usable.size(); ++i) {
        if (usable[i]) {
            const double a = std::abs(est.ratios[i]);
            sum += a;
            sum2 += a * a;
        }
    }
    const double mean = sum / n_usable;
    const double var = std::max(0.0, sum2 / n_usable - mean * mean);
    if (!(mean > 0.0) || std::sqrt(var) > options.max_amplitude_spread * mean) {
        throw EstimationError("estimate_si_channel: deconvolved bins are inconsistent with a single path");
    }

    // Merge p and -p (conjugate pair), unwrap along consecutive harmonics, LS slope through the origin.
    std::vector<Complex> dbar(static_cast<std::size_t>(P + 1), 0.0);
    std::vector<double> weight(static_cast<std::size_t>(P + 1), 0.0);
    for (int p = 1; p <= P; ++p) {
        const auto ip = static_cast<std::size_t>(P + p);
        const auto im = static_cast<std::size_t>(P - p);
        int c = 0;
        if (usable[ip]) {
            dbar[p] += est.ratios[ip];
            weight[p] += std::norm(gamma[ip]);
            ++c;
        }
        if (usable[im]) {
            dbar[p] += std::conj(est.ratios[im]);
            weight[p] += std::norm(gamma[im]);
            ++c;
        }
        if (c > 0) {
            dbar[p] /= static_cast<double>(c);
        }
    }
    if (weight[1] == 0.0) {
        throw EstimationError("estimate_si_channel: fundamental pilot bin unusable");
    }
    double phase = std::arg(dbar[1]);
    if (phase > 0.0) {
        phase -= 2.0 * kPi;  // -w0 tau lies in (-2 pi, 0]
    }
    // each harmonic is unwrapped around the slope fitted so far; differences of
    // consecutive harmonics alias once w0 tau exceeds pi
    double num = weight[1] * phase;
    double den = weight[1];
    for (int p = 2; p <= P; ++p) {
        if (weight[p] == 0.0) {
            continue;
        }
        const double predicted = num / den * p;
        phase = predicted + wrap_phase(std::arg(dbar[p]) - predicted);
        num += weight[p] * p * phase;
        den += weight[p] * static_cast<double>(p) * p;
    }
    const double slope = num / den;
    double tau = -slope / pilot.fundamental();
    tau = std::fmod(tau, pilot.period);
    if (tau < 0.0) {
        tau += pilot.period;
    }
    if (tau >= pilot.period) {
        tau = 0.0;
    }
    est.channel = SparseChannel{mean, tau, ChannelKind::SelfInterference};
    return est;
}

double channel_nmse(const SparseChannel& estimate, const SparseChannel& truth, const PilotSpec& pilot)
{
    if (!(truth.amplitude > 0.0)) {
        throw std::invalid_argument("channel_nmse: truth amplitude must be positive");
    }
    const double w0 = pilot.fundamental();
    double err = 0.0;
    double ref = 0.0;
    for (int p = -pilot.harmonics; p <= pilot.harmonics; ++p) {
        const Complex h = std::polar(truth.amplitude, -p * w0 * truth.delay);
        const Complex hh = std::polar(estimate.amplitude, -p * w0 * estimate.delay);
        err += std::norm(hh - h);
        ref += std::norm(h);
    }
    return err / ref;
}

}  // namespace usfd
