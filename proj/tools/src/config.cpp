#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "acdma/error.hpp"

namespace acdma::cli {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value)
{
    throw Error(ErrorCode::InvalidArgument, "bad value '" + value + "' for " + key);
}

double to_double(const std::string& key, const std::string& value)
{
    const std::string v = trim(value);
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x)) {
        bad_value(key, value);
    }
    return x;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& value)
{
    const std::string v = trim(value);
    std::uint64_t x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        bad_value(key, value);
    }
    return x;
}

bool to_bool(const std::string& key, const std::string& value)
{
    const std::string v = trim(value);
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    bad_value(key, value);
}

struct Field {
    std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
Field unsigned_field(T ExperimentConfig::*m)
{
    return {[m](ExperimentConfig& c, const std::string& k, const std::string& v) {
                c.*m = static_cast<T>(to_unsigned(k, v));
            },
            [m](const ExperimentConfig& c) { return std::to_string(c.*m); }};
}

Field double_field(double ExperimentConfig::*m)
{
    return {[m](ExperimentConfig& c, const std::string& k, const std::string& v) { c.*m = to_double(k, v); },
            [m](const ExperimentConfig& c) { return format_double(c.*m); }};
}

Field string_field(std::string ExperimentConfig::*m)
{
    return {[m](ExperimentConfig& c, const std::string&, const std::string& v) { c.*m = trim(v); },
            [m](const ExperimentConfig& c) { return c.*m; }};
}

Field bool_field(bool ExperimentConfig::*m)
{
    return {[m](ExperimentConfig& c, const std::string& k, const std::string& v) { c.*m = to_bool(k, v); },
            [m](const ExperimentConfig& c) { return std::string(c.*m ? "true" : "false"); }};
}

const std::map<std::string, Field>& fields()
{
    static const std::map<std::string, Field> table = {
        {"seed", unsigned_field(&ExperimentConfig::seed)},
        {"out", string_field(&ExperimentConfig::out)},
        {"grid", unsigned_field(&ExperimentConfig::grid)},
        {"trials", unsigned_field(&ExperimentConfig::trials)},
        {"waveform", string_field(&ExperimentConfig::waveform)},
        {"r",
         {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
              c.r = static_cast<int>(to_unsigned(k, v));
          },
          [](const ExperimentConfig& c) { return std::to_string(c.r); }}},
        {"beta", string_field(&ExperimentConfig::beta)},
        {"ebn0_db", double_field(&ExperimentConfig::ebn0_db)},
        {"n0", double_field(&ExperimentConfig::n0)},
        {"N", unsigned_field(&ExperimentConfig::n)},
        {"K", unsigned_field(&ExperimentConfig::k)},
        {"alpha", string_field(&ExperimentConfig::alpha)},
        {"delays", string_field(&ExperimentConfig::delays)},
        {"powers", string_field(&ExperimentConfig::powers)},
        {"kind", string_field(&ExperimentConfig::kind)},
        {"solver", string_field(&ExperimentConfig::solver)},
        {"window", unsigned_field(&ExperimentConfig::window)},
        {"cross_check", bool_field(&ExperimentConfig::cross_check)},
        {"sync_baseline", bool_field(&ExperimentConfig::sync_baseline)},
        {"perturb_qbar", double_field(&ExperimentConfig::perturb_qbar)},
    };
    return table;
}

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        parts.push_back(trim(item));
    }
    return parts;
}

} // namespace

std::string format_double(double x)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

ExperimentConfig defaults_for(const std::string& command)
{
    ExperimentConfig c;
    c.command = command;
    if (command == "figure2") {
        c.waveform = "sinc:1";
        c.r = 2;
    } else if (command == "figure3") {
        c.beta = "0.25:8:0.25";
    } else if (command == "theorem3") {
        c.n = 64;
        c.k = 32;
        c.trials = 100;
    } else if (command == "capacity") {
        c.beta = "0.5,1,2";
    }
    return c;
}

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys = {
        "seed",  "out",    "grid",   "trials", "waveform", "r",      "beta",        "ebn0_db",       "n0",
        "N",     "K",      "alpha",  "delays", "powers",   "kind",   "solver",      "window",        "cross_check",
        "sync_baseline", "perturb_qbar"};
    return keys;
}

void set_value(ExperimentConfig& config, const std::string& key, const std::string& value)
{
    const auto it = fields().find(key);
    if (it == fields().end()) {
        throw Error(ErrorCode::InvalidArgument, "unknown configuration key '" + key + "'");
    }
    it->second.set(config, key, value);
}

std::string get_value(const ExperimentConfig& config, const std::string& key)
{
    const auto it = fields().find(key);
    if (it == fields().end()) {
        throw Error(ErrorCode::InvalidArgument, "unknown configuration key '" + key + "'");
    }
    return it->second.get(config);
}

void apply_file(ExperimentConfig& config, const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open config file " + path);
    }
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::InvalidArgument, path + ":" + std::to_string(number) + ": expected key = value");
        }
        set_value(config, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
}

void finalize(ExperimentConfig& c)
{
    if (c.grid < 2 || c.grid % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument, "grid must be an even number >= 2");
    }
    if (c.trials == 0) {
        throw Error(ErrorCode::InvalidArgument, "trials must be positive");
    }
    if (c.r < 1) {
        throw Error(ErrorCode::InvalidArgument, "r must be positive");
    }
    if (!(c.n0 > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "n0 must be positive");
    }
    if (c.n == 0) {
        throw Error(ErrorCode::InvalidArgument, "N must be positive");
    }
    if (c.window < 2) {
        throw Error(ErrorCode::InvalidArgument, "window must be at least 2");
    }
    if (c.solver != "scalar" && c.solver != "matrix") {
        throw Error(ErrorCode::InvalidArgument, "solver must be scalar or matrix");
    }
    for (double b : parse_list(c.beta)) {
        if (!(b >= 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "beta must be nonnegative");
        }
    }
    for (double a : parse_list(c.alpha)) {
        if (!(a > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
        }
    }
    parse_kind(c.kind);
    parse_powers(c.powers);
    c.ebn0_linear = from_db(c.ebn0_db);
}

void dump(std::ostream& out, const ExperimentConfig& config, const std::string& prefix)
{
    for (const auto& key : config_keys()) {
        out << prefix << key << " = " << get_value(config, key) << '\n';
    }
}

std::vector<double> parse_list(const std::string& text)
{
    const std::string t = trim(text);
    if (t.empty()) {
        throw Error(ErrorCode::InvalidArgument, "empty list");
    }
    if (t.find(':') != std::string::npos) {
        const auto parts = split(t, ':');
        if (parts.size() != 3) {
            throw Error(ErrorCode::InvalidArgument, "range must be start:stop:step, got '" + t + "'");
        }
        const double start = to_double("range", parts[0]);
        const double stop = to_double("range", parts[1]);
        const double step = to_double("range", parts[2]);
        if (!(step > 0.0) || stop < start) {
            throw Error(ErrorCode::InvalidArgument, "range needs step > 0 and stop >= start");
        }
        const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        std::vector<double> out(count);
        for (std::size_t i = 0; i < count; ++i) {
            out[i] = start + static_cast<double>(i) * step;
        }
        return out;
    }
    std::vector<double> out;
    for (const auto& p : split(t, ',')) {
        out.push_back(to_double("list", p));
    }
    return out;
}

PowerLaw parse_powers(const std::string& text)
{
    PowerLaw law;
    const auto parts = split(text, ',');
    for (const auto& p : parts) {
        const auto at = p.find('@');
        if (at == std::string::npos) {
            law.push_back({to_double("powers", p), 1.0 / static_cast<double>(parts.size())});
        } else {
            law.push_back({to_double("powers", p.substr(0, at)), to_double("powers", p.substr(at + 1))});
        }
    }
    double total = 0.0;
    for (const auto& a : law) {
        if (!(a.power >= 0.0) || !(a.weight > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "powers need power >= 0 and weight > 0");
        }
        total += a.weight;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw Error(ErrorCode::InvalidArgument, "power weights must sum to 1");
    }
    for (auto& a : law) {
        a.weight /= total;
    }
    return law;
}

PowerDelayLaw parse_delays(const std::string& text, const PowerLaw& powers, double chip_interval)
{
    const auto colon = text.find(':');
    const std::string kind = trim(text.substr(0, colon));
    const std::string arg = colon == std::string::npos ? std::string() : trim(text.substr(colon + 1));
    if (kind == "uniform") {
        return PowerDelayLaw::uniform_delays(powers, static_cast<std::size_t>(to_unsigned("delays", arg)),
                                             chip_interval);
    }
    if (kind == "point") {
        return PowerDelayLaw::point_delay(powers, to_double("delays", arg) * chip_interval, chip_interval);
    }
    if (kind == "list") {
        std::vector<double> d;
        for (const auto& p : split(arg, ',')) {
            d.push_back(to_double("delays", p) * chip_interval);
        }
        std::vector<double> w(d.size(), 1.0 / static_cast<double>(d.size()));
        return PowerDelayLaw::independent(powers, d, w, chip_interval);
    }
    throw Error(ErrorCode::InvalidArgument, "delays must be uniform:<n>, point:<tau/Tc> or list:<tau/Tc>,...");
}

MatrixKind parse_kind(const std::string& text)
{
    if (text == "circulant" || text == "block_circulant") {
        return MatrixKind::BlockCirculant;
    }
    if (text == "toeplitz" || text == "block_toeplitz") {
        return MatrixKind::BlockToeplitz;
    }
    throw Error(ErrorCode::InvalidArgument, "kind must be circulant or toeplitz");
}

} // namespace acdma::cli
