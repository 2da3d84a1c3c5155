#include "usfd/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace usfd {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

double to_double(const std::string& key, const std::string& v)
{
    std::size_t pos = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "' expects a number, got '" + v + "'");
    }
    if (pos != v.size() || !std::isfinite(d)) {
        throw std::invalid_argument("config: key '" + key + "' expects a number, got '" + v + "'");
    }
    return d;
}

long long to_int(const std::string& key, const std::string& v)
{
    const double d = to_double(key, v);
    if (d != std::floor(d) || std::abs(d) > 9.0e15) {
        throw std::invalid_argument("config: key '" + key + "' expects an integer, got '" + v + "'");
    }
    return static_cast<long long>(d);
}

bool to_bool(const std::string& key, const std::string& v)
{
    const std::string l = lower(v);
    if (l == "true" || l == "1" || l == "yes" || l == "on") {
        return true;
    }
    if (l == "false" || l == "0" || l == "no" || l == "off") {
        return false;
    }
    throw std::invalid_argument("config: key '" + key + "' expects a boolean, got '" + v + "'");
}

bool is_unset(const std::string& v)
{
    const std::string l = lower(v);
    return l == "auto" || l == "none";
}

const std::vector<std::string> kKeys = {
    "schema_version", "seed", "trials", "symbols", "symbol_period", "oversampling", "sps", "pulse",
    "rolloff", "span", "pilot_samples", "pilot_harmonics", "pilot_peak_ratio", "ideal_pilot",
    "pilot_only", "si_amplitude", "si_delay_samples", "sir_db", "snr_db", "p_u", "p_d", "uplink_gain",
    "lambda", "zeta", "bits", "order", "beta", "dr_multiplier", "nlms", "nlms_order", "nlms_step",
    "nlms_regularizer", "clipped_baseline"};

}  // namespace

std::vector<std::string> ExperimentConfig::keys() { return kKeys; }

void ExperimentConfig::set(const std::string& key_in, const std::string& value_in)
{
    const std::string key = trim(key_in);
    const std::string v = trim(value_in);
    auto opt_double = [&](std::optional<double>& field) {
        field = is_unset(v) ? std::nullopt : std::optional<double>(to_double(key, v));
    };
    auto opt_int = [&](std::optional<int>& field) {
        field = is_unset(v) ? std::nullopt : std::optional<int>(static_cast<int>(to_int(key, v)));
    };
    if (key == "schema_version") {
        schema_version = static_cast<int>(to_int(key, v));
    } else if (key == "seed") {
        const long long s = to_int(key, v);
        if (s < 0) {
            throw std::invalid_argument("config: seed must be non-negative");
        }
        seed = static_cast<std::uint64_t>(s);
    } else if (key == "trials") {
        trials = static_cast<int>(to_int(key, v));
    } else if (key == "symbols") {
        symbols = static_cast<int>(to_int(key, v));
    } else if (key == "symbol_period") {
        symbol_period = to_double(key, v);
    } else if (key == "oversampling") {
        oversampling = to_double(key, v);
    } else if (key == "sps") {
        opt_int(sps);
    } else if (key == "pulse") {
        pulse = lower(v);
    } else if (key == "rolloff") {
        rolloff = to_double(key, v);
    } else if (key == "span") {
        span = static_cast<int>(to_int(key, v));
    } else if (key == "pilot_samples") {
        pilot_samples = static_cast<int>(to_int(key, v));
    } else if (key == "pilot_harmonics") {
        pilot_harmonics = static_cast<int>(to_int(key, v));
    } else if (key == "pilot_peak_ratio") {
        pilot_peak_ratio = to_double(key, v);
    } else if (key == "ideal_pilot") {
        ideal_pilot = to_bool(key, v);
    } else if (key == "pilot_only") {
        pilot_only = to_bool(key, v);
    } else if (key == "si_amplitude") {
        opt_double(si_amplitude);
    } else if (key == "si_delay_samples") {
        opt_double(si_delay_samples);
    } else if (key == "sir_db") {
        sir_db = to_double(key, v);
    } else if (key == "snr_db") {
        opt_double(snr_db);
    } else if (key == "p_u") {
        p_u = to_double(key, v);
    } else if (key == "p_d") {
        p_d = to_double(key, v);
    } else if (key == "uplink_gain") {
        uplink_gain = to_double(key, v);
    } else if (key == "lambda") {
        opt_double(lambda);
    } else if (key == "zeta") {
        zeta = to_double(key, v);
    } else if (key == "bits") {
        opt_int(bits);
    } else if (key == "order") {
        opt_int(order);
    } else if (key == "beta") {
        opt_double(beta);
    } else if (key == "dr_multiplier") {
        dr_multiplier = to_double(key, v);
    } else if (key == "nlms") {
        nlms = to_bool(key, v);
    } else if (key == "nlms_order") {
        nlms_config.order = static_cast<int>(to_int(key, v));
    } else if (key == "nlms_step") {
        nlms_config.step = to_double(key, v);
    } else if (key == "nlms_regularizer") {
        nlms_config.regularizer = to_double(key, v);
    } else if (key == "clipped_baseline") {
        clipped_baseline = to_bool(key, v);
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

void ExperimentConfig::validate() const
{
    auto fail = [](const std::string& m) { throw std::invalid_argument("config: " + m); };
    if (schema_version != 1) {
        fail("unsupported schema_version " + std::to_string(schema_version));
    }
    if (trials < 1) {
        fail("trials must be >= 1");
    }
    if (symbols < 2) {
        fail("symbols must be >= 2");
    }
    if (!(symbol_period > 0.0)) {
        fail("symbol_period must be positive");
    }
    if (!sps && !(oversampling > 0.0)) {
        fail("oversampling must be positive");
    }
    if (sps && *sps < 1) {
        fail("sps must be >= 1");
    }
    if (pulse != "rrc" && pulse != "rect") {
        fail("pulse must be rrc or rect");
    }
    if (rolloff < 0.0 || rolloff > 1.0 || span < 1) {
        fail("rolloff must lie in [0,1] and span >= 1");
    }
    if (pilot_harmonics < 1 || pilot_samples < 2 * pilot_harmonics + 1) {
        fail("pilot needs harmonics >= 1 and pilot_samples >= 2P+1");
    }
    if (!(pilot_peak_ratio > 0.0)) {
        fail("pilot_peak_ratio must be positive");
    }
    if (si_amplitude && !(*si_amplitude >= 0.0)) {
        fail("si_amplitude must be non-negative");
    }
    if (si_delay_samples && (*si_delay_samples < 0.0 || *si_delay_samples >= pilot_samples)) {
        fail("si_delay_samples must lie in [0, pilot_samples)");
    }
    if (p_u < 0.0 || p_d < 0.0) {
        fail("powers must be non-negative");
    }
    if (uplink_gain == 0.0) {
        fail("uplink_gain must be non-zero");
    }
    if (lambda && !(*lambda > 0.0)) {
        fail("lambda must be positive");
    }
    if (!(zeta > 0.0) || zeta > 1.0) {
        fail("zeta must lie in (0, 1]");
    }
    if (bits && (*bits < 1 || *bits > 30)) {
        fail("bits must lie in [1, 30]");
    }
    if (order && *order < 1) {
        fail("order must be >= 1");
    }
    if (beta && !(*beta > 0.0)) {
        fail("beta must be positive");
    }
    if (!(dr_multiplier > 0.0)) {
        fail("dr_multiplier must be positive");
    }
    if (nlms_config.order < 1 || nlms_config.step < 0.0 || nlms_config.step > 2.0 ||
        !(nlms_config.regularizer > 0.0)) {
        fail("invalid NLMS parameters");
    }
}

int ExperimentConfig::samples_per_symbol() const
{
    if (sps) {
        return *sps;
    }
    const double excess = pulse == "rrc" ? rolloff : 1.0;
    return static_cast<int>(std::ceil(oversampling * (1.0 + excess) - 1e-9));
}

double ExperimentConfig::sample_interval() const { return symbol_period / samples_per_symbol(); }

PulseShape ExperimentConfig::pulse_shape() const
{
    return pulse == "rect" ? PulseShape::rectangular() : PulseShape::root_raised_cosine(rolloff, span);
}

double ExperimentConfig::bandwidth() const { return pulse_bandwidth(pulse_shape(), symbol_period); }

double ExperimentConfig::si_amplitude_value() const
{
    return si_amplitude.value_or(std::pow(10.0, -sir_db / 20.0));
}

ExperimentConfig ExperimentConfig::parse(const std::string& text)
{
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool have_version = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: line " + std::to_string(lineno) + " is not key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        cfg.set(key, line.substr(eq + 1));
        have_version = have_version || key == "schema_version";
    }
    if (!have_version) {
        throw std::invalid_argument("config: missing schema_version");
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path)
{
    std::ifstream f(path);
    if (!f) {
        throw std::invalid_argument("config: cannot open " + path);
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

}  // namespace usfd
