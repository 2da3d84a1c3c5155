#include <doctest.h>

#include <cmath>
#include <sstream>

#include "usfd/config.hpp"
#include "usfd/csv.hpp"
#include "usfd/experiment.hpp"

using namespace usfd;

namespace {

ExperimentConfig small_config()
{
    auto cfg = ExperimentConfig::load(USFD_CONFIG_DIR "/sec4_sir20.cfg");
    cfg.trials = 6;
    cfg.symbols = 128;
    return cfg;
}

std::string trials_csv(const ExperimentResult& r)
{
    std::ostringstream out;
    write_trials_csv(out, r);
    return out.str();
}

}  // namespace

TEST_CASE("config parsing")
{
    const auto cfg = ExperimentConfig::parse(
        "# comment line\n"
        "schema_version = 1\n"
        "\n"
        "seed=12   # trailing comment\n"
        "lambda = auto\n"
        "bits = none\n"
        "snr_db = none\n"
        "sps = 6\n");
    CHECK(cfg.seed == 12);
    CHECK_FALSE(cfg.lambda.has_value());
    CHECK_FALSE(cfg.bits.has_value());
    CHECK_FALSE(cfg.snr_db.has_value());
    CHECK(cfg.samples_per_symbol() == 6);
    CHECK(cfg.si_amplitude_value() == doctest::Approx(10.0));

    CHECK_THROWS_AS(ExperimentConfig::parse("seed = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::parse("schema_version = 2\n"), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::parse("schema_version = 1\nfoo = 3\n"), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::parse("schema_version = 1\nbits = four\n"), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::parse("schema_version = 1\njust words\n"), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/x.cfg"), std::invalid_argument);

    SUBCASE("default sampling grid")
    {
        ExperimentConfig d;
        CHECK(d.samples_per_symbol() == 23);
        CHECK(d.sample_interval() == doctest::Approx(1e-6 / 23));
    }
}

TEST_CASE("csv helpers")
{
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
    CHECK(csv_number(std::nan("")) == "nan");
    CHECK(csv_number(0.1) == "0.10000000000000001");
    CHECK(std::stod(csv_number(1.0 / 3.0)) == 1.0 / 3.0);

    std::ostringstream out;
    CsvWriter w(out);
    w.row({"a", "b,c"});
    CHECK(out.str() == "a,\"b,c\"\r\n");
}

TEST_CASE("experiment determinism")
{
    const auto cfg = small_config();
    const auto a = run_experiment(cfg);
    const auto b = run_experiment(cfg);
    const auto s = serial::run_experiment(cfg);
    CHECK(trials_csv(a) == trials_csv(b));
    CHECK(trials_csv(a) == trials_csv(s));
    CHECK(a.aggregate.trials == 6);

    const std::string csv = trials_csv(a);
    const std::string header = csv.substr(0, csv.find("\r\n"));
    CHECK(header.rfind("trial,status,", 0) == 0);
    CHECK(header.find(",message") != std::string::npos);

    auto other = cfg;
    other.seed += 1;
    CHECK(trials_csv(run_experiment(other)) != trials_csv(a));
}

TEST_CASE("zero self-interference")
{
    auto cfg = small_config();
    cfg.si_amplitude = 0.0;
    cfg.lambda = 1.0;
    cfg.nlms = false;
    const auto r = run_experiment(cfg);
    for (const auto& t : r.trials) {
        CHECK(t.status == "ok");
        CHECK(std::isnan(t.a_hat));  // no pilot phase without SI
        CHECK(t.si_mse == 0.0);
        CHECK(t.ber == 0.0);
    }
}

TEST_CASE("sweep")
{
    auto cfg = small_config();
    cfg.trials = 2;
    CHECK_THROWS_AS(sweep(cfg, "not_a_key", {"1"}), std::invalid_argument);
    CHECK_THROWS_AS(sweep(cfg, "schema_version", {"1"}), std::invalid_argument);
    CHECK_THROWS_AS(sweep(cfg, "bits", {}), std::invalid_argument);

    const auto rows = sweep(cfg, "bits", {"4", "8", "none"});
    REQUIRE(rows.size() == 3);
    std::ostringstream out;
    write_sweep_csv(out, "bits", rows);
    const std::string text = out.str();
    std::size_t lines = 0;
    for (std::size_t p = text.find("\r\n"); p != std::string::npos; p = text.find("\r\n", p + 2)) {
        ++lines;
    }
    CHECK(lines == 4);
    CHECK(text.rfind("axis,value,trials,ok,lambda_mean,lambda_std", 0) == 0);
    // finer quantization never worsens the recovered-sample MSE
    const auto col = [&](const SweepRow& r) {
        const auto& cols = metric_columns();
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (std::string(cols[c].name) == "rx_mse") {
                return r.aggregate.mean[c];
            }
        }
        return std::nan("");
    };
    CHECK(col(rows[1]) < col(rows[0]));
    CHECK(col(rows[2]) <= col(rows[1]));
}

TEST_CASE("received-sample MSE lands in the expected range")
{
    auto cfg = ExperimentConfig::load(USFD_CONFIG_DIR "/sec4_sir20.cfg");
    cfg.trials = 20;
    const auto r = run_experiment(cfg);
    const auto& cols = metric_columns();
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (std::string(cols[c].name) == "rx_mse") {
            CHECK(r.aggregate.mean[c] > 3e-3);
            CHECK(r.aggregate.mean[c] < 4e-2);
        }
    }
    CHECK(r.aggregate.ok == 20);
}
