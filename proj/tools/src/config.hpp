#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "acdma/large_system.hpp"
#include "acdma/montecarlo.hpp"
#include "acdma/waveforms.hpp"

namespace acdma::cli {

/// Resolved parameters of one subcommand. Keys mirror the command-line flags.
struct ExperimentConfig {
    std::string command;
    std::uint64_t seed = 1;
    std::string out = "-";
    std::size_t grid = 512;
    std::size_t trials = 200;
    std::string waveform = "rrc:0.22";
    int r = 2;
    std::string beta = "1";
    double ebn0_db = 10.0;
    double n0 = 0.1;
    std::size_t n = 128;
    std::size_t k = 0;  // 0: round(beta N)
    std::string alpha = "0.25:2:0.125";
    std::string delays = "uniform:64";
    std::string powers = "1";
    std::string kind = "circulant";
    std::string solver = "scalar";
    std::size_t window = 3;
    bool cross_check = false;
    bool sync_baseline = false;
    double perturb_qbar = 0.0;

    // Filled by finalize().
    double ebn0_linear = 0.0;
};

/// Defaults of a subcommand before any file or flag override.
ExperimentConfig defaults_for(const std::string& command);

/// Names of all configuration keys in output order.
const std::vector<std::string>& config_keys();

/// Sets a key from its textual value; throws Error(InvalidArgument) on an
/// unknown key or malformed value.
void set_value(ExperimentConfig& config, const std::string& key, const std::string& value);
std::string get_value(const ExperimentConfig& config, const std::string& key);

/// Reads "key = value" lines; blank lines and lines starting with '#' are skipped.
void apply_file(ExperimentConfig& config, const std::string& path);

/// Checks physical parameters and converts dB values once.
void finalize(ExperimentConfig& config);

/// "key = value" lines for every key.
void dump(std::ostream& out, const ExperimentConfig& config, const std::string& prefix = "");

/// "x", "x,y,z" or "start:stop:step" (inclusive).
std::vector<double> parse_list(const std::string& text);

PowerLaw parse_powers(const std::string& text);
/// "uniform:<n>", "point:<tau/Tc>" or "list:<tau/Tc>,..." (equal weights).
PowerDelayLaw parse_delays(const std::string& text, const PowerLaw& powers, double chip_interval);
MatrixKind parse_kind(const std::string& text);

std::string format_double(double x);

} // namespace acdma::cli
