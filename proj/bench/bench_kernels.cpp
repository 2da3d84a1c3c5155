// Wall-clock comparison of the OpenMP kernels against their serial references.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#include <omp.h>

#include "usfd/experiment.hpp"
#include "usfd/frontend.hpp"

using namespace usfd;

namespace {

double seconds(const std::function<void()>& f, int reps)
{
    f();  // warm-up
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) {
        f();
    }
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

void report(const char* name, double par, double ser, bool same)
{
    std::printf("%-22s parallel %9.4f s  serial %9.4f s  speedup %5.2fx  %s\n", name, par, ser, ser / par,
                same ? "identical" : "MISMATCH");
}

}  // namespace

int main()
{
    std::printf("threads: %d\n", omp_get_max_threads());

    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 5.0);
    ComplexVec s(1 << 21);
    for (auto& v : s) {
        v = {g(rng), g(rng)};
    }
    const BasebandSignal x(s, 1.0, 1.0);
    const ModuloAdcConfig adc{1.0, 6};
    report("modulo_adc (2M)", seconds([&] { (void)modulo_adc(x, adc); }, 5),
           seconds([&] { (void)serial::modulo_adc(x, adc); }, 5),
           modulo_adc(x, adc).samples() == serial::modulo_adc(x, adc).samples());

    const auto mp = measure_quant_noise(0.1, 8, 4000000, 3);
    const auto ms = serial::measure_quant_noise(0.1, 8, 4000000, 3);
    report("measure_quant_noise", seconds([] { (void)measure_quant_noise(0.1, 8, 4000000, 3); }, 3),
           seconds([] { (void)serial::measure_quant_noise(0.1, 8, 4000000, 3); }, 3),
           mp.modulo_var == ms.modulo_var && mp.conventional_var == ms.conventional_var);

    ExperimentConfig cfg;
    cfg.trials = 32;
    cfg.symbols = 256;
    const auto rp = run_experiment(cfg);
    const auto rs = serial::run_experiment(cfg);
    bool same = rp.trials.size() == rs.trials.size();
    for (std::size_t i = 0; same && i < rp.trials.size(); ++i) {
        same = rp.trials[i].si_mse == rs.trials[i].si_mse && rp.trials[i].rx_mse == rs.trials[i].rx_mse;
    }
    report("run_experiment (32)", seconds([&] { (void)run_experiment(cfg); }, 1),
           seconds([&] { (void)serial::run_experiment(cfg); }, 1), same);
    return 0;
}
