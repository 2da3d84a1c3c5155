#include "usfd/experiment.hpp"

#include <algorithm>
#include <cmath>

#include "usfd/chanest.hpp"
#include "usfd/csv.hpp"
#include "usfd/frontend.hpp"
#include "usfd/rng.hpp"
#include "usfd/unfolding.hpp"

namespace usfd {

const std::vector<MetricColumn>& metric_columns()
{
    static const std::vector<MetricColumn> cols = {
        {"lambda", &TrialRecord::lambda},
        {"beta", &TrialRecord::beta},
        {"order", &TrialRecord::order},
        {"folds", &TrialRecord::folds},
        {"a_true", &TrialRecord::a_true},
        {"a_hat", &TrialRecord::a_hat},
        {"tau_true", &TrialRecord::tau_true},
        {"tau_hat", &TrialRecord::tau_hat},
        {"channel_nmse", &TrialRecord::channel_nmse},
        {"rx_mse", &TrialRecord::rx_mse},
        {"rx_mse_clipped", &TrialRecord::rx_mse_clipped},
        {"si_mse", &TrialRecord::si_mse},
        {"si_nmse", &TrialRecord::si_nmse},
        {"si_mse_nlms", &TrialRecord::si_mse_nlms},
        {"si_nmse_nlms", &TrialRecord::si_nmse_nlms},
        {"soi_mse", &TrialRecord::soi_mse},
        {"ber", &TrialRecord::ber},
        {"sic_db", &TrialRecord::sic_db},
        {"sic_db_nlms", &TrialRecord::sic_db_nlms},
        {"quant_noise_modulo", &TrialRecord::quant_noise_modulo},
        {"quant_noise_conventional", &TrialRecord::quant_noise_conventional},
        {"quant_gap_db", &TrialRecord::quant_gap_db},
    };
    return cols;
}

namespace {

enum Stream : std::uint64_t {
    kBitsUplink = 1,
    kBitsDownlink = 2,
    kDataNoise = 3,
    kPilotPhases = 4,
    kPilotNoise = 5,
    kDelay = 6,
};

ComplexVec scaled(const ComplexVec& x, double g)
{
    ComplexVec out(x);
    for (auto& v : out) {
        v *= g;
    }
    return out;
}

RealVec real_rail(const ComplexVec& x)
{
    RealVec out(x.size());
    std::transform(x.begin(), x.end(), out.begin(), [](const Complex& c) { return c.real(); });
    return out;
}

double power_ratio_db(double num, double den) { return 10.0 * std::log10(num / den); }

}  // namespace

TrialRecord run_trial(const ExperimentConfig& cfg, int index, WaveformDump* dump)
{
    TrialRecord rec;
    rec.trial = index;
    const std::uint64_t ts = derive_seed(cfg.seed, static_cast<std::uint64_t>(index));
    const int sps = cfg.samples_per_symbol();
    const double T = cfg.sample_interval();
    const PulseShape pulse = cfg.pulse_shape();
    const double m = cfg.dr_multiplier;
    const double A = cfg.si_amplitude_value();
    const int N = cfg.pilot_samples;

    double tau_samples = 0.0;
    if (cfg.si_delay_samples) {
        tau_samples = *cfg.si_delay_samples;
    } else {
        Rng rng(derive_seed(ts, kDelay));
        tau_samples = std::uniform_real_distribution<double>(0.0, N)(rng);
    }
    rec.a_true = A;
    rec.tau_true = tau_samples;

    // data phase waveforms
    const auto n_bits = static_cast<std::size_t>(2 * cfg.symbols);
    const BitVec bits_u = random_bits(n_bits, derive_seed(ts, kBitsUplink));
    const BitVec bits_d = random_bits(n_bits, derive_seed(ts, kBitsDownlink));
    const BasebandSignal soi_tx = pulse_shape(qpsk_modulate(bits_u), sps, pulse, cfg.symbol_period);
    const BasebandSignal xd = pulse_shape(qpsk_modulate(bits_d), sps, pulse, cfg.symbol_period);
    const BasebandSignal soi = soi_tx.with_samples(scaled(soi_tx.samples(), cfg.uplink_gain));
    const BasebandSignal si = apply_sparse_channel(xd, SparseChannel{A, tau_samples * T}, 1.0);

    const double noise_ref = cfg.p_u * cfg.uplink_gain * cfg.uplink_gain;
    MixtureConfig mix_cfg{cfg.p_u, cfg.p_d, cfg.snr_db, std::nullopt, noise_ref, derive_seed(ts, kDataNoise)};
    const Mixture mix = compose_mixture(soi, si, mix_cfg);

    const BasebandSignal r = mix.received.with_samples(scaled(mix.received.samples(), m));
    const ComplexVec soi_truth = scaled(mix.soi, m);
    const ComplexVec si_truth = scaled(mix.si, m);
    const ComplexVec noise_truth = scaled(mix.noise, m);
    const double peak = r.rail_peak();
    const double p_si = mean_power(si_truth);

    const double lambda = cfg.lambda.value_or(cfg.zeta * peak);
    const double beta = cfg.beta.value_or(beta_for_peak(peak, lambda));
    rec.lambda = lambda;
    rec.beta = beta;
    UnfoldingConfig ucfg{1, lambda, beta, T, cfg.bandwidth(), 0};
    if (cfg.order) {
        ucfg.order = *cfg.order;
    } else {
        ucfg.order = choose_order(ucfg, std::min(1.0, lambda / peak));
    }
    rec.order = ucfg.order;

    const ModuloAdcConfig adc{lambda, cfg.bits};

    // pilot phase: SI only, same receive chain
    const double gain = m * std::sqrt(cfg.p_d) * A;
    SparseChannel h_hat{0.0, 0.0, ChannelKind::SelfInterference};
    if (gain > 0.0) {
        const double Tp = N * T;
        const PilotSpec unit = make_random_pilot(cfg.pilot_harmonics, N, Tp, 1.0, derive_seed(ts, kPilotPhases));
        const double unit_peak = generate_pilot(unit, T).rail_peak();
        const double amp = cfg.pilot_peak_ratio * lambda / (gain * unit_peak);
        const PilotSpec pilot = make_random_pilot(cfg.pilot_harmonics, N, Tp, amp, derive_seed(ts, kPilotPhases));
        const BasebandSignal rp = sample_pilot(pilot, static_cast<std::size_t>(N) + 1, tau_samples * T, gain);

        RealVec observed(rp.size());
        double sigma = 0.0;
        ComplexVec pn(rp.size(), 0.0);
        if (!cfg.ideal_pilot && cfg.snr_db) {
            const double var = noise_ref / std::pow(10.0, *cfg.snr_db / 10.0);
            pn = complex_gaussian(rp.size(), var, derive_seed(ts, kPilotNoise));
            sigma = m * std::sqrt(var / 2.0);
        }
        const std::optional<int> pilot_bits = cfg.ideal_pilot ? std::nullopt : cfg.bits;
        const QuantizerSpec pq{2.0 * lambda, pilot_bits};
        for (std::size_t k = 0; k < rp.size(); ++k) {
            observed[k] = quantize_midrise(modulo_fold(rp.samples()[k].real() + m * pn[k].real(), lambda), pq);
        }
        ChannelEstimateOptions opts;
        if (!cfg.ideal_pilot) {
            opts.noise_sigma = std::sqrt(sigma * sigma + pq.step() * pq.step() / 12.0);
        }
        try {
            const ChannelEstimate est = estimate_si_channel(observed, pilot, lambda, opts);
            h_hat = est.channel;
            rec.folds = static_cast<double>(est.folds.count());
        } catch (const EstimationError& e) {
            rec.status = "estimation_failed";
            rec.message = e.what();
        }
        rec.a_hat = h_hat.amplitude / (m * std::sqrt(cfg.p_d));
        rec.tau_hat = h_hat.delay / T;
        rec.channel_nmse = channel_nmse(h_hat, SparseChannel{gain, tau_samples * T}, pilot);
    }
    if (cfg.pilot_only) {
        return rec;
    }

    // ADC paths
    const BasebandSignal q = modulo_adc(r, adc);
    const BasebandSignal folded = fold_signal(r, lambda);
    rec.quant_noise_modulo = mean_squared_error(q.samples(), folded.samples());
    const BasebandSignal conv_full = conventional_adc(r, 2.0 * peak, cfg.bits);
    rec.quant_noise_conventional = mean_squared_error(conv_full.samples(), r.samples());
    if (rec.quant_noise_modulo > 0.0) {
        rec.quant_gap_db = power_ratio_db(rec.quant_noise_conventional, rec.quant_noise_modulo);
    }
    if (cfg.clipped_baseline) {
        const BasebandSignal clipped = conventional_adc(r, 2.0 * lambda, cfg.bits);
        rec.rx_mse_clipped = mean_squared_error(clipped.samples(), r.samples());
    }

    // proposed SI reconstruction
    const BasebandSignal si_hat = reconstruct_si(h_hat, xd);
    rec.si_mse = mean_squared_error(si_hat.samples(), si_truth);
    if (p_si > 0.0) {
        rec.si_nmse = rec.si_mse / p_si;
    }

    std::optional<BasebandSignal> recovered;
    try {
        recovered = usf_recover(q, ucfg);
    } catch (const RecoveryError& e) {
        rec.status = "recovery_failed";
        rec.message = e.what();
    }

    const double h_u = m * std::sqrt(cfg.p_u) * cfg.uplink_gain;
    auto residual_db = [&](const ComplexVec& soi_hat) {
        double acc = 0.0;
        for (std::size_t k = 0; k < soi_hat.size(); ++k) {
            acc += std::norm(soi_hat[k] - soi_truth[k] - noise_truth[k]);
        }
        return power_ratio_db(p_si, acc / static_cast<double>(soi_hat.size()));
    };

    ComplexVec soi_hat;
    if (recovered) {
        rec.rx_mse = mean_squared_error(recovered->samples(), r.samples());
        const SicResult sic = cancel_si(*recovered, si_hat, std::span<const Complex>(si_truth));
        soi_hat = sic.r_soi.samples();
        rec.soi_mse = mean_squared_error(soi_hat, soi_truth);
        if (p_si > 0.0) {
            rec.sic_db = residual_db(soi_hat);
        }
        const BitVec detected = qpsk_detect(sic.r_soi, SparseChannel{h_u, 0.0, ChannelKind::Uplink}, sps, pulse);
        rec.ber = bit_error_rate(detected, bits_u);
    }

    BasebandSignal si_hat_nlms = si_hat.with_samples(ComplexVec(si_hat.size(), 0.0));
    if (cfg.nlms) {
        si_hat_nlms = nlms_estimate(xd, conv_full, cfg.nlms_config);
        rec.si_mse_nlms = mean_squared_error(si_hat_nlms.samples(), si_truth);
        if (p_si > 0.0) {
            rec.si_nmse_nlms = rec.si_mse_nlms / p_si;
            ComplexVec soi_nlms(conv_full.size());
            for (std::size_t k = 0; k < soi_nlms.size(); ++k) {
                soi_nlms[k] = conv_full.samples()[k] - si_hat_nlms.samples()[k];
            }
            rec.sic_db_nlms = residual_db(soi_nlms);
        }
    }

    if (dump) {
        dump->truth = real_rail(r.samples());
        dump->folded = real_rail(folded.samples());
        dump->quantized = real_rail(q.samples());
        dump->recovered = recovered ? real_rail(recovered->samples()) : RealVec(r.size(), kNaN);
        dump->si_hat_proposed = real_rail(si_hat.samples());
        dump->si_hat_nlms = real_rail(si_hat_nlms.samples());
        dump->soi_hat = recovered ? real_rail(soi_hat) : RealVec(r.size(), kNaN);
    }
    return rec;
}

Aggregate aggregate(const std::vector<TrialRecord>& trials)
{
    const auto& cols = metric_columns();
    Aggregate a;
    a.trials = static_cast<int>(trials.size());
    a.mean.assign(cols.size(), kNaN);
    a.std.assign(cols.size(), kNaN);
    for (const auto& t : trials) {
        a.ok += t.status == "ok" ? 1 : 0;
    }
    for (std::size_t c = 0; c < cols.size(); ++c) {
        double sum = 0.0;
        int n = 0;
        for (const auto& t : trials) {
            const double v = t.*(cols[c].field);
            if (std::isfinite(v)) {
                sum += v;
                ++n;
            }
        }
        if (n == 0) {
            continue;
        }
        const double mean = sum / n;
        double ss = 0.0;
        for (const auto& t : trials) {
            const double v = t.*(cols[c].field);
            if (std::isfinite(v)) {
                ss += (v - mean) * (v - mean);
            }
        }
        a.mean[c] = mean;
        a.std[c] = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
    }
    return a;
}

namespace {

ExperimentResult run_impl(const ExperimentConfig& cfg, bool parallel)
{
    cfg.validate();
    ExperimentResult res;
    res.trials.resize(static_cast<std::size_t>(cfg.trials));
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int i = 0; i < cfg.trials; ++i) {
        try {
            res.trials[static_cast<std::size_t>(i)] = run_trial(cfg, i);
        } catch (const std::exception& e) {
            TrialRecord bad;
            bad.trial = i;
            bad.status = "error";
            bad.message = e.what();
            res.trials[static_cast<std::size_t>(i)] = bad;
        }
    }
    res.aggregate = aggregate(res.trials);
    return res;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) { return run_impl(cfg, true); }

namespace serial {
ExperimentResult run_experiment(const ExperimentConfig& cfg) { return run_impl(cfg, false); }
}  // namespace serial

void write_trials_csv(std::ostream& out, const ExperimentResult& result)
{
    CsvWriter w(out);
    std::vector<std::string> header = {"trial", "status"};
    for (const auto& c : metric_columns()) {
        header.emplace_back(c.name);
    }
    header.emplace_back("message");
    w.row(header);
    for (const auto& t : result.trials) {
        std::vector<std::string> row = {std::to_string(t.trial), t.status};
        for (const auto& c : metric_columns()) {
            row.push_back(csv_number(t.*(c.field)));
        }
        row.push_back(t.message);
        w.row(row);
    }
    const auto& a = result.aggregate;
    const std::string status = "ok=" + std::to_string(a.ok) + "/" + std::to_string(a.trials);
    for (int which = 0; which < 2; ++which) {
        std::vector<std::string> row = {which == 0 ? "mean" : "std", status};
        const auto& v = which == 0 ? a.mean : a.std;
        for (double x : v) {
            row.push_back(csv_number(x));
        }
        row.emplace_back();
        w.row(row);
    }
}

void write_waveforms_csv(std::ostream& out, const WaveformDump& d)
{
    CsvWriter w(out);
    w.row({"k", "truth", "folded", "quantized", "recovered", "si_hat_proposed", "si_hat_nlms", "soi_hat"});
    for (std::size_t k = 0; k < d.truth.size(); ++k) {
        w.row({std::to_string(k), csv_number(d.truth[k]), csv_number(d.folded[k]), csv_number(d.quantized[k]),
               csv_number(d.recovered[k]), csv_number(d.si_hat_proposed[k]), csv_number(d.si_hat_nlms[k]),
               csv_number(d.soi_hat[k])});
    }
}

}  // namespace usfd
