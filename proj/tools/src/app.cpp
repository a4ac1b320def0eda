#include "app.hpp"

#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "acdma/error.hpp"
#include "commands.hpp"

namespace acdma::cli {

namespace {

struct FlagSpec {
    const char* flag;
    const char* key;
    const char* help;
};

constexpr FlagSpec value_flags[] = {
    {"--seed", "seed", "master seed (u64)"},
    {"--out", "out", "output path, '-' for stdout"},
    {"--grid", "grid", "frequency grid size M"},
    {"--trials", "trials", "Monte Carlo trials"},
    {"--waveform", "waveform", "sinc:<alpha> | rrc:<rho> | table:<csv>"},
    {"--r", "r", "oversampling factor"},
    {"--beta", "beta", "load: <f>, <f,f,...> or <start:stop:step>"},
    {"--ebn0-db", "ebn0_db", "Eb/N0 target in dB"},
    {"--n0", "n0", "noise spectral density N0"},
    {"--N", "N", "spreading factor"},
    {"--K", "K", "number of users (0: round(beta N))"},
    {"--alpha", "alpha", "normalized bandwidths for figure2"},
    {"--delays", "delays", "uniform:<n> | point:<tau/Tc> | list:<tau/Tc>,..."},
    {"--powers", "powers", "<p> or <p@w>,<p@w>,..."},
    {"--kind", "kind", "circulant | toeplitz"},
    {"--solver", "solver", "scalar | matrix"},
    {"--window", "window", "symbols on each side of the centre symbol"},
    {"--perturb-qbar", "perturb_qbar", "add this to the oscillating matrix in the trace check (negative control)"},
};

struct Invocation {
    std::map<std::string, std::string> values;
    std::string config_file;
    bool dump_config = false;
    bool cross_check = false;
    bool sync_baseline = false;
};

void add_options(CLI::App& sub, Invocation& inv)
{
    for (const auto& f : value_flags) {
        sub.add_option_function<std::string>(
            f.flag, [&inv, key = std::string(f.key)](const std::string& v) { inv.values[key] = v; }, f.help);
    }
    sub.add_option("--config", inv.config_file, "key = value configuration file");
    sub.add_flag("--dump-config", inv.dump_config, "print the resolved configuration and exit");
    sub.add_flag("--cross-check", inv.cross_check, "also run the matrix solver (efficiency)");
    sub.add_flag("--sync-baseline", inv.sync_baseline, "use the synchronous baseline (efficiency)");
}

int exit_code_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::NonConvergence:
    case ErrorCode::Divergence:
    case ErrorCode::NotPositiveDefinite:
        return exit_nonconvergence;
    default:
        return exit_invalid;
    }
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Large-system analysis of chip-asynchronous random CDMA", "acdma"};
    app.require_subcommand(1);
    Invocation inv;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"efficiency", "multiuser efficiency spectral density and scalar efficiency"},
        {"capacity", "constrained capacity, spectral efficiency and Eb/N0 per load"},
        {"figure2", "spectral efficiency versus normalized sinc bandwidth at fixed Eb/N0"},
        {"figure3", "asynchronous and synchronous spectral efficiency versus load at fixed Eb/N0"},
        {"montecarlo", "finite-size MMSE SINR trials with large-system predictions"},
        {"theorem3", "paired trials: delays over a symbol versus delays modulo Tc"},
        {"verify", "property suite with residuals"},
    };
    for (const auto& [name, help] : commands) {
        add_options(*app.add_subcommand(name, help), inv);
    }

    std::ostringstream cli_out;
    std::ostringstream cli_err;
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, cli_out, cli_err);
        out << cli_out.str();
        err << cli_err.str();
        return code == 0 ? exit_ok : exit_invalid;
    }

    std::string command;
    for (const auto* sub : app.get_subcommands()) {
        command = sub->get_name();
    }

    try {
        ExperimentConfig config = defaults_for(command);
        if (!inv.config_file.empty()) {
            apply_file(config, inv.config_file);
        }
        for (const auto& [key, value] : inv.values) {
            set_value(config, key, value);
        }
        config.cross_check = config.cross_check || inv.cross_check;
        config.sync_baseline = config.sync_baseline || inv.sync_baseline;
        finalize(config);

        if (inv.dump_config) {
            dump(out, config);
            return exit_ok;
        }

        std::ofstream file;
        std::ostream* sink = &out;
        if (config.out != "-") {
            file.open(config.out, std::ios::binary);
            if (!file) {
                throw Error(ErrorCode::Io, "cannot write " + config.out);
            }
            sink = &file;
        }

        int code = exit_ok;
        if (command == "efficiency") {
            cmd_efficiency(config, *sink, err);
        } else if (command == "capacity") {
            cmd_capacity(config, *sink, err);
        } else if (command == "figure2") {
            cmd_figure2(config, *sink, err);
        } else if (command == "figure3") {
            cmd_figure3(config, *sink, err);
        } else if (command == "montecarlo") {
            cmd_montecarlo(config, *sink, err);
        } else if (command == "theorem3") {
            cmd_theorem3(config, *sink, err);
        } else if (command == "verify") {
            code = cmd_verify(config, *sink, err) ? exit_ok : exit_failed_property;
        }
        sink->flush();
        return code;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_invalid;
    }
}

} // namespace acdma::cli
