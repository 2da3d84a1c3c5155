// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "usfd/chanest.hpp"
#include "usfd/config.hpp"
#include "usfd/experiment.hpp"
#include "usfd/frontend.hpp"
#include "usfd/unfolding.hpp"
#include "usfd/waveforms.hpp"

using namespace usfd;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void run(const std::string& name, double budget_s, const std::function<Outcome()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = o.pass;
    std::ostringstream tail;
    tail << " [" << std::fixed;
    tail.precision(2);
    tail << dt << " s";
    if (budget_s > 0.0) {
        tail << " / budget " << budget_s << " s";
        if (dt > budget_s) {
            ok = false;
            tail << " EXCEEDED";
        }
    }
    tail << "]";
    if (!ok) {
        ++failures;
    }
    std::printf("%s %s: %s%s\n", ok ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), tail.str().c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double column(const Aggregate& a, const char* name)
{
    const auto& cols = metric_columns();
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (std::string(cols[c].name) == name) {
            return a.mean[c];
        }
    }
    throw std::invalid_argument(std::string("no column ") + name);
}

bool within_factor(double v, double ref, double f) { return v >= ref / f && v <= ref * f; }

ExperimentConfig load(const char* name) { return ExperimentConfig::load(std::string(USFD_CONFIG_DIR "/") + name); }

// Pilot of period N samples (T = 1) seen through one path and folded.
RealVec folded_frame(const PilotSpec& p, const SparseChannel& h, double lambda)
{
    const auto r = sample_pilot(p, static_cast<std::size_t>(p.sample_count) + 1, h.delay, h.amplitude);
    RealVec y(r.size());
    for (std::size_t k = 0; k < y.size(); ++k) {
        y[k] = modulo_fold(r.samples()[k].real(), lambda);
    }
    return y;
}

int spike_count(const PilotSpec& p, const SparseChannel& h, double lambda)
{
    const auto r = sample_pilot(p, static_cast<std::size_t>(p.sample_count) + 1, h.delay, h.amplitude);
    int c = 0;
    double prev = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        const double x = r.samples()[k].real();
        const double e = x - modulo_fold(x, lambda);
        if (k > 0 && std::abs(e - prev) > lambda) {
            ++c;
        }
        prev = e;
    }
    return c;
}

}  // namespace

int main()
{
    run("quantization noise gap 20 +- 0.5 dB, b = 1..12", 10.0, [] {
        double worst = 0.0;
        std::ostringstream d;
        for (int b = 1; b <= 12; ++b) {
            const auto m = measure_quant_noise(0.1, b, 1000000, 1000 + static_cast<std::uint64_t>(b));
            worst = std::max(worst, std::abs(m.gap_db - 20.0));
            d << (b > 1 ? " " : "") << fmt("%.2f", m.gap_db);
        }
        return Outcome{worst <= 0.5, "gaps [" + d.str() + "] dB, worst deviation " + fmt("%.3f", worst) + " dB"};
    });

    run("effective bits b_lambda(b=3, zeta=0.1) in [6, 6.5]", 1.0, [] {
        const auto r = quant_noise_analysis(ModuloAdcConfig{0.1, 3}, 1.0);
        return Outcome{r.effective_bits >= 6.0 && r.effective_bits <= 6.5,
                       "b_lambda = " + fmt("%.4f", r.effective_bits)};
    });

    run("exact unfolding of 200 bandlimited signals, peak/lambda in [2, 20]", 30.0, [] {
        const double W = 1.0;
        const double T = 1.0 / (2.0 * W * std::numbers::e);
        std::mt19937_64 rng(2026);
        std::uniform_real_distribution<double> ratio(2.0, 20.0);
        double worst = 0.0;
        int max_order = 0;
        for (int i = 0; i < 200; ++i) {
            const double peak = ratio(rng);
            const RealVec r = testing::sinc_mixture(1024, T, W, peak, 5000 + static_cast<std::uint64_t>(i), 12, 150.0);
            UnfoldingConfig cfg;
            cfg.lambda = 1.0;
            cfg.beta = beta_for_peak(peak, 1.0);
            cfg.sample_interval = T;
            cfg.bandwidth = W;
            cfg.order = choose_order(cfg, 1.0 / peak);
            max_order = std::max(max_order, cfg.order);
            RealVec y(r.size());
            for (std::size_t k = 0; k < r.size(); ++k) {
                y[k] = modulo_fold(r[k], 1.0);
            }
            const RealVec out = usf_recover(y, cfg);
            for (std::size_t k = 0; k < r.size(); ++k) {
                worst = std::max(worst, std::abs(out[k] - r[k]));
            }
        }
        return Outcome{worst < 1e-9, "max error " + fmt("%.3g", worst) + ", orders up to " + std::to_string(max_order)};
    });

    run("lattice property x - M(x) in 2 lambda Z over 1e5 points", 0.0, [] {
        std::mt19937_64 rng(44);
        std::uniform_real_distribution<double> logmag(-3.0, 6.0);
        std::uniform_real_distribution<double> loglam(-3.0, 3.0);
        std::bernoulli_distribution sign;
        double worst = 0.0;  // in ulps of |x|
        for (int i = 0; i < 100000; ++i) {
            const double x = (sign(rng) ? -1.0 : 1.0) * std::pow(10.0, logmag(rng));
            const double lambda = std::pow(10.0, loglam(rng));
            const double y = modulo_fold(x, lambda);
            if (!(y >= -lambda && y < lambda)) {
                return Outcome{false, "output outside [-lambda, lambda)"};
            }
            const double m = std::round((x - y) / (2.0 * lambda));
            const double resid = std::abs(x - y - 2.0 * lambda * m);
            const double ulp = std::numeric_limits<double>::epsilon() * std::max({std::abs(x), lambda, 1e-300});
            worst = std::max(worst, resid / ulp);
        }
        return Outcome{worst <= 8.0, "worst lattice residual " + fmt("%.2f", worst) + " ulp(|x|)"};
    });

    run("noiseless single-path estimation for K >= 2(M+2)", 60.0, [] {
        // P = 1 leaves K - 4 out-of-band bins for a K-sample frame (N = K - 1 samples per period).
        const int trials = 20;
        std::mt19937_64 rng(77);
        std::uniform_real_distribution<double> amp(0.5, 10.0), u01(0.0, 1.0);
        int checked = 0;
        int failed_above = 0;
        std::map<int, std::vector<int>> below;  // M -> K values with failures
        std::vector<int> unreachable;           // circular residues make the spike count even
        std::ostringstream d;
        for (int M : {1, 2, 3, 4, 6}) {
            const int bound = 2 * (M + 2);
            bool reached = false;
            for (int K = std::max(5, bound - 3); K <= 48; ++K) {
                const int N = K - 1;
                int ok = 0, tried = 0;
                for (int t = 0; t < trials; ++t) {
                    const PilotSpec pilot =
                        make_random_pilot(1, N, static_cast<double>(N), 1.0, rng());
                    const SparseChannel h{amp(rng), u01(rng) * N};
                    // lambda with exactly M folds in the frame
                    double lambda = -1.0;
                    const double peak = sample_pilot(pilot, static_cast<std::size_t>(N), h.delay, h.amplitude).rail_peak();
                    for (int s = 0; s < 4000 && lambda < 0.0; ++s) {
                        const double cand = peak * (0.02 + 0.98 * u01(rng));
                        if (spike_count(pilot, h, cand) == M) {
                            lambda = cand;
                        }
                    }
                    if (lambda < 0.0) {
                        continue;  // M folds unreachable for this draw
                    }
                    ++tried;
                    ChannelEstimateOptions opts;
                    opts.fold_count = M;
                    try {
                        const auto e = estimate_si_channel(folded_frame(pilot, h, lambda), pilot, lambda, opts);
                        double dtau = std::abs(e.channel.delay - h.delay);
                        dtau = std::min(dtau, N - dtau);
                        if (std::abs(e.channel.amplitude - h.amplitude) / h.amplitude < 1e-6 && dtau / N < 1e-6) {
                            ++ok;
                        }
                    } catch (const std::exception&) {
                    }
                }
                if (tried == 0) {
                    continue;
                }
                reached = true;
                if (K >= bound) {
                    ++checked;
                    if (ok != tried) {
                        ++failed_above;
                        d << " M=" << M << ",K=" << K << ":" << ok << "/" << tried;
                    }
                } else if (ok != tried) {
                    below[M].push_back(K);
                }
            }
            if (!reached) {
                unreachable.push_back(M);
            }
        }
        std::ostringstream b;
        for (const auto& [M, ks] : below) {
            b << " M=" << M << ":K=";
            for (std::size_t i = 0; i < ks.size(); ++i) {
                b << (i ? "," : "") << ks[i];
            }
        }
        std::string detail = std::to_string(checked) + " (M, K) cells at or above the bound, " +
                             std::to_string(failed_above) + " with failures" + d.str();
        detail += "; failures below the bound:" + (b.str().empty() ? std::string(" none") : b.str());
        if (!unreachable.empty()) {
            detail += "; never realised (odd spike count on a periodic frame): M =";
            for (int M : unreachable) {
                detail += " " + std::to_string(M);
            }
        }
        return Outcome{failed_above == 0 && checked > 0, detail};
    });

    run("channel-estimate NMSE non-increasing over SNR 0..50 dB", 300.0, [] {
        const auto cfg = load("fig2_nmse.cfg");
        const std::vector<std::string> snrs = {"0", "10", "20", "30", "40", "50"};
        const auto rows = sweep(cfg, "snr_db", snrs);
        bool mono = true;
        std::ostringstream d;
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double v = column(rows[i].aggregate, "channel_nmse");
            mono = mono && std::isfinite(v) && v <= prev;
            prev = v;
            d << (i ? " " : "") << snrs[i] << "dB:" << fmt("%.3g", v);
        }
        return Outcome{mono, "NMSE " + d.str()};
    });

    // one run of the 20 dB scenario feeds the end-to-end and ordering criteria
    ExperimentResult sir20;
    double sir20_seconds = 0.0;
    {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            sir20 = run_experiment(load("sec4_sir20.cfg"));
        } catch (const std::exception& e) {
            std::printf("FAIL loading 20 dB scenario: %s\n", e.what());
            ++failures;
        }
        sir20_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    run("end-to-end 20 dB scenario: MSE and BER within x3 of reference", 120.0, [&] {
        if (sir20.trials.empty()) {
            return Outcome{false, "scenario did not run"};
        }
        const double mse = column(sir20.aggregate, "rx_mse");
        const double ber = column(sir20.aggregate, "ber");
        const bool ok_mse = within_factor(mse, 1.17e-2, 3.0);
        const bool ok_ber = within_factor(ber, 7.47e-2, 3.0);
        std::string d = "rx MSE " + fmt("%.3g", mse) + (ok_mse ? " (in" : " (out of") + " [3.9e-3, 3.51e-2])";
        d += ", BER " + fmt("%.3g", ber) + (ok_ber ? " (in" : " (out of") + " [2.49e-2, 2.24e-1])";
        d += ", scenario time " + fmt("%.1f", sir20_seconds) + " s";
        return Outcome{ok_mse && ok_ber && sir20_seconds < 120.0, d};
    });

    run("40 dB SIC with noiseless channel estimation", 120.0, [] {
        auto cfg = load("sec4_sir40.cfg");
        cfg.ideal_pilot = true;
        const auto r = run_experiment(cfg);
        const double sic = column(r.aggregate, "sic_db");
        const double ber = column(r.aggregate, "ber");
        const bool ok = sic >= 35.0 && std::isfinite(ber) && ber < 0.5;
        const std::string bracket = within_factor(ber, 1.572e-1, 3.0) ? "inside" : "outside";
        return Outcome{ok, "SIC " + fmt("%.2f", sic) + " dB, BER " + fmt("%.3g", ber) +
                               " (reference bracket [5.24e-2, 4.72e-1]: " + bracket + ", informational)"};
    });

    run("baseline orderings: modulo vs clipped >= 20 dB, proposed beats NLMS in >= 95/100", 0.0, [&] {
        if (sir20.trials.empty()) {
            return Outcome{false, "scenario did not run"};
        }
        const double mse = column(sir20.aggregate, "rx_mse");
        const double clipped = column(sir20.aggregate, "rx_mse_clipped");
        const double gap = 10.0 * std::log10(clipped / mse);
        int wins = 0;
        for (const auto& t : sir20.trials) {
            wins += (std::isfinite(t.si_mse) && std::isfinite(t.si_mse_nlms) && t.si_mse < t.si_mse_nlms) ? 1 : 0;
        }
        const int n = static_cast<int>(sir20.trials.size());
        const bool ok = gap >= 20.0 && wins * 100 >= 95 * n;
        return Outcome{ok, "clipped/modulo MSE gap " + fmt("%.1f", gap) + " dB, proposed better in " +
                               std::to_string(wins) + "/" + std::to_string(n) + " trials"};
    });

    run("oracles: pulse shape 1e-12, Prony 1e-9, quantizer variance 5%", 0.0, [] {
        // pulse shaping against direct convolution
        const auto sym = qpsk_modulate(random_bits(1000, 31));
        const int sps = 23;
        const PulseShape pulse = PulseShape::root_raised_cosine(0.25, 8);
        const auto y = pulse_shape(sym, sps, pulse, 1.0);
        ComplexVec up((sym.size() - 1) * sps + 1, 0.0);
        for (std::size_t n = 0; n < sym.size(); ++n) {
            up[n * sps] = sym[n];
        }
        const auto ref = testing::naive_convolution(up, pulse_taps(pulse, sps));
        double e_pulse = 0.0;
        for (std::size_t k = 0; k < ref.size(); ++k) {
            e_pulse = std::max(e_pulse, std::abs(ref[k] - y.samples()[k]));
        }

        // Prony on noiseless on-grid spikes
        std::mt19937_64 rng(32);
        double e_prony = 0.0;
        for (int t = 0; t < 200; ++t) {
            const int N = 64;
            const int M = 1 + static_cast<int>(rng() % 6);
            std::vector<int> loc;
            while (static_cast<int>(loc.size()) < M) {
                const int c = static_cast<int>(rng() % N);
                if (std::find(loc.begin(), loc.end(), c) == loc.end()) {
                    loc.push_back(c);
                }
            }
            std::sort(loc.begin(), loc.end());
            RealVec mu;
            for (int m = 0; m < M; ++m) {
                mu.push_back(2.0 * static_cast<double>(1 + rng() % 3) * (rng() % 2 ? -1.0 : 1.0));
            }
            ComplexVec z(N - 5, 0.0);
            for (std::size_t n = 0; n < z.size(); ++n) {
                for (int m = 0; m < M; ++m) {
                    z[n] += mu[m] * std::polar(1.0, -2.0 * std::numbers::pi * (3 + n) * loc[m] / N);
                }
            }
            const auto f = prony(z, M, BinLayout{3, N}, 1.0);
            if (f.count() != static_cast<std::size_t>(M)) {
                e_prony = std::numeric_limits<double>::infinity();
                break;
            }
            for (int m = 0; m < M; ++m) {
                e_prony = std::max({e_prony, std::abs(f.amplitudes[m] - mu[m]), std::abs(f.locations[m] - loc[m])});
            }
            const auto fit = prony_fit(z, M);
            for (std::size_t n = 0; n < z.size(); ++n) {
                Complex s = 0.0;
                for (int m = 0; m < M; ++m) {
                    s += fit.amplitudes[m] * std::pow(fit.roots[m], static_cast<double>(n));
                }
                e_prony = std::max(e_prony, std::abs(s - z[n]));
            }
        }

        // uniform-input quantization error variance
        double worst_var = 0.0;
        for (int b = 4; b <= 12; ++b) {
            const QuantizerSpec q{2.0, b};
            std::mt19937_64 g(400 + static_cast<std::uint64_t>(b));
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            double acc = 0.0;
            const int n = 200000;
            for (int i = 0; i < n; ++i) {
                const double x = u(g);
                const double e = quantize_midrise(x, q) - x;
                acc += e * e;
            }
            worst_var = std::max(worst_var, std::abs(acc / n / (q.step() * q.step() / 12.0) - 1.0));
        }
        const bool ok = e_pulse < 1e-12 && e_prony < 1e-9 && worst_var < 0.05;
        return Outcome{ok, "pulse " + fmt("%.2g", e_pulse) + ", Prony " + fmt("%.2g", e_prony) +
                               ", variance deviation " + fmt("%.2f%%", 100.0 * worst_var)};
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
