#pragma once

#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "usfd/config.hpp"

namespace usfd {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// One Monte Carlo trial. Metrics that a failed stage cannot produce are NaN.
struct TrialRecord {
    int trial = 0;
    std::string status = "ok";  // ok | estimation_failed | recovery_failed
    std::string message;

    double lambda = kNaN;
    double beta = kNaN;
    double order = kNaN;
    double folds = kNaN;         // fold spikes Prony kept in the pilot frame
    double a_true = kNaN;
    double a_hat = kNaN;
    double tau_true = kNaN;      // samples
    double tau_hat = kNaN;       // samples
    double channel_nmse = kNaN;
    double rx_mse = kNaN;        // modulo path: recovered vs unfolded received samples
    double rx_mse_clipped = kNaN;  // conventional ADC spanning 2 lambda
    double si_mse = kNaN;
    double si_nmse = kNaN;
    double si_mse_nlms = kNaN;
    double si_nmse_nlms = kNaN;
    double soi_mse = kNaN;
    double ber = kNaN;
    double sic_db = kNaN;        // SI power over everything left after cancellation except SoI and thermal noise
    double sic_db_nlms = kNaN;
    double quant_noise_modulo = kNaN;
    double quant_noise_conventional = kNaN;  // full-DR conventional ADC, same bits
    double quant_gap_db = kNaN;
};

struct MetricColumn {
    const char* name;
    double TrialRecord::*field;
};

/// Numeric per-trial columns in CSV order.
const std::vector<MetricColumn>& metric_columns();

struct Aggregate {
    int trials = 0;
    int ok = 0;
    std::vector<double> mean;  // per metric column, over finite values
    std::vector<double> std;
};

struct ExperimentResult {
    std::vector<TrialRecord> trials;
    Aggregate aggregate;
};

/// Real-rail waveforms of one trial for figure regeneration.
struct WaveformDump {
    RealVec truth, folded, quantized, recovered, si_hat_proposed, si_hat_nlms, soi_hat;
};

TrialRecord run_trial(const ExperimentConfig& cfg, int index, WaveformDump* dump = nullptr);

Aggregate aggregate(const std::vector<TrialRecord>& trials);

/// Trials run in parallel; each trial is seeded from (cfg.seed, index) so the
/// result equals serial::run_experiment bit for bit.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

namespace serial {
ExperimentResult run_experiment(const ExperimentConfig& cfg);
}  // namespace serial

void write_trials_csv(std::ostream& out, const ExperimentResult& result);
void write_waveforms_csv(std::ostream& out, const WaveformDump& dump);

struct SweepRow {
    std::string value;
    Aggregate aggregate;
};

/// Re-runs the experiment with cfg.set(axis, v) for every v. Any scalar
/// config key is a valid axis; unknown keys throw std::invalid_argument.
std::vector<SweepRow> sweep(const ExperimentConfig& cfg, const std::string& axis,
                            const std::vector<std::string>& values);

void write_sweep_csv(std::ostream& out, const std::string& axis, const std::vector<SweepRow>& rows);

}  // namespace usfd
