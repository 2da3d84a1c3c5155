#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "usfd/sic.hpp"
#include "usfd/waveforms.hpp"

namespace usfd {

/// Flat key=value experiment description. Optional numeric keys accept "auto"
/// (derived per trial) or "none" where noted in the README.
struct ExperimentConfig {
    int schema_version = 1;
    std::uint64_t seed = 1;
    int trials = 100;
    int symbols = 512;

    double symbol_period = 1e-6;
    double oversampling = 18.0;       // sample rate as a multiple of the Nyquist rate
    std::optional<int> sps;           // overrides oversampling
    std::string pulse = "rrc";        // rrc | rect
    double rolloff = 0.25;
    int span = 8;

    int pilot_samples = 64;
    int pilot_harmonics = 2;
    double pilot_peak_ratio = 2.5;    // received pilot peak / lambda
    bool ideal_pilot = false;         // pilot phase without noise and quantization
    bool pilot_only = false;

    std::optional<double> si_amplitude;      // auto: 10^(-sir_db / 20)
    std::optional<double> si_delay_samples = 5.3;  // none: uniform in [0, pilot_samples)
    double sir_db = -20.0;
    std::optional<double> snr_db = 40.0;     // none: noiseless
    double p_u = 1.0;
    double p_d = 1.0;
    double uplink_gain = 1.0;

    std::optional<double> lambda;     // auto: zeta * peak of the received frame
    double zeta = 0.1;
    std::optional<int> bits = 4;      // none: ideal quantizer
    std::optional<int> order;         // auto: choose_order
    std::optional<double> beta;       // auto: smallest 2 lambda multiple >= peak
    double dr_multiplier = 1.0;       // receive gain applied before both ADC paths

    bool nlms = true;
    NlmsConfig nlms_config{};
    bool clipped_baseline = true;

    /// Parses one key; throws std::invalid_argument on unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
    void validate() const;

    int samples_per_symbol() const;
    double sample_interval() const;
    double bandwidth() const;
    PulseShape pulse_shape() const;
    double si_amplitude_value() const;

    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path);
    static std::vector<std::string> keys();
};

}  // namespace usfd
