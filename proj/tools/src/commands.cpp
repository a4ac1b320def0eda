#include "commands.hpp"

#include <cmath>
#include <ostream>

#include "acdma/capacity.hpp"
#include "acdma/error.hpp"

namespace acdma::cli {

namespace {

SystemLaw system_for(const ExperimentConfig& c, double load, const ChipWaveform& w)
{
    const PowerLaw powers = parse_powers(c.powers);
    return SystemLaw{load, c.n0, c.r, w, parse_delays(c.delays, powers, w.chip_interval())};
}

void require_converged(const FixedPointReport& report, const std::string& what)
{
    if (!report.converged) {
        throw Error(ErrorCode::NonConvergence, what + " stopped after " + std::to_string(report.iterations)
                                                   + " iterations with residual " + format_double(report.final_residual));
    }
}

std::string cell(const std::optional<double>& x)
{
    return x ? format_double(*x) : std::string();
}

std::size_t users_for(const ExperimentConfig& c, double load)
{
    if (c.k > 0) {
        return c.k;
    }
    const auto k = static_cast<std::size_t>(std::llround(load * static_cast<double>(c.n)));
    if (k == 0) {
        throw Error(ErrorCode::InvalidArgument, "beta N rounds to zero users");
    }
    return k;
}

double single_load(const ExperimentConfig& c)
{
    const auto loads = parse_list(c.beta);
    if (loads.size() != 1) {
        throw Error(ErrorCode::InvalidArgument, "this command takes a single beta");
    }
    return loads.front();
}

} // namespace

void write_header(std::ostream& out, const ExperimentConfig& config)
{
    out << "# acdma " << config.command << '\n';
    dump(out, config, "# ");
}

void cmd_efficiency(const ExperimentConfig& c, std::ostream& out, std::ostream& log)
{
    const ChipWaveform w = parse_waveform(c.waveform);
    const auto loads = parse_list(c.beta);
    write_header(out, c);

    if (c.solver == "matrix") {
        out << "beta,delay_over_tc,power,sinr,efficiency,eta\n";
        for (double load : loads) {
            const SystemLaw sys = system_for(c, load, w);
            const UpsilonSolution sol = solve_upsilon(sys, FrequencyGrid(c.grid));
            require_converged(sol.report, "matrix fixed point");
            const double eta = mean_efficiency(sol.field, sys);
            for (const auto& a : sys.law.atoms()) {
                const double sinr = sinr_user(sol.field, sys, a.power, a.delay);
                const double eff = a.power == 0.0 ? 0.0 : efficiency_of_user(sinr, a.power, sys);
                out << format_double(load) << ',' << format_double(a.delay / w.chip_interval()) << ','
                    << format_double(a.power) << ',' << format_double(sinr) << ',' << format_double(eff) << ','
                    << format_double(eta) << '\n';
            }
        }
        return;
    }

    out << "beta,omega,density,eta" << (c.cross_check ? ",eta_matrix" : "") << '\n';
    for (double load : loads) {
        const SystemLaw sys = system_for(c, load, w);
        EfficiencySpectrum spec;
        if (c.sync_baseline) {
            // Nyquist sinc band with a flat density.
            const double eta = solve_efficiency_sync(load, sys.law.power_marginal(), c.n0 / w.energy());
            const double edge = pi / w.chip_interval();
            const double step = 2.0 * edge / static_cast<double>(c.grid);
            for (std::size_t i = 0; i < c.grid; ++i) {
                spec.omega.push_back(-edge + (static_cast<double>(i) + 0.5) * step);
                spec.density.push_back(eta);
            }
            spec.scalar = eta;
        } else {
            ScalarSolveOptions opts;
            opts.grid_points = c.grid;
            spec = solve_efficiency_scalar(sys, opts);
            require_converged(spec.report, "scalar efficiency");
        }
        std::string matrix_cell;
        if (c.cross_check) {
            const UpsilonSolution sol = solve_upsilon(sys, FrequencyGrid(c.grid));
            require_converged(sol.report, "matrix fixed point");
            const double eta_matrix = mean_efficiency(sol.field, sys);
            matrix_cell = "," + format_double(eta_matrix);
            log << "beta " << load << ": scalar eta " << format_double(spec.scalar) << ", matrix eta "
                << format_double(eta_matrix) << ", relative difference "
                << format_double(std::abs(eta_matrix - spec.scalar) / spec.scalar) << '\n';
        }
        for (std::size_t i = 0; i < spec.omega.size(); ++i) {
            out << format_double(load) << ',' << format_double(spec.omega[i]) << ',' << format_double(spec.density[i])
                << ',' << format_double(spec.scalar) << matrix_cell << '\n';
        }
    }
}

void cmd_capacity(const ExperimentConfig& c, std::ostream& out, std::ostream&)
{
    const ChipWaveform w = parse_waveform(c.waveform);
    write_header(out, c);
    out << "beta,snr,capacity_async,capacity_sync,gamma_async,gamma_sync,ebn0_db_async,ebn0_db_sync\n";
    CapacityOptions opts;
    opts.scalar.grid_points = c.grid;
    for (double load : parse_list(c.beta)) {
        const SystemLaw sys = system_for(c, load, w);
        const double snr = sys.snr();
        const double ca = capacity_constrained(sys, opts);
        const double cs = load > 0.0 ? capacity_sync_closed_form(load, snr) : 0.0;
        const CapacityResult ra = make_capacity_result(load, snr, ca, w);
        const CapacityResult rs = make_capacity_result(load, snr, cs, w);
        auto db = [](double x) { return x > 0.0 ? format_double(to_db(x)) : std::string(); };
        out << format_double(load) << ',' << format_double(snr) << ',' << format_double(ca) << ',' << format_double(cs)
            << ',' << format_double(ra.spectral_efficiency) << ',' << format_double(rs.spectral_efficiency) << ','
            << db(ra.eb_n0) << ',' << db(rs.eb_n0) << '\n';
    }
}

void cmd_figure2(const ExperimentConfig& c, std::ostream& out, std::ostream& log)
{
    const double load = single_load(c);
    CapacityOptions opts;
    opts.scalar.grid_points = c.grid;
    const auto rows = figure2_rows(parse_list(c.alpha), load, c.ebn0_linear, opts);
    write_header(out, c);
    out << "alpha,gamma_async_sinc,gamma_sync\n";
    for (const auto& row : rows) {
        if (!row.gamma_async || !row.gamma_sync) {
            log << "warning: alpha " << row.alpha << ": Eb/N0 target not reachable\n";
        }
        out << format_double(row.alpha) << ',' << cell(row.gamma_async) << ',' << cell(row.gamma_sync) << '\n';
    }
}

void cmd_figure3(const ExperimentConfig& c, std::ostream& out, std::ostream& log)
{
    const ChipWaveform w = parse_waveform(c.waveform);
    CapacityOptions opts;
    opts.scalar.grid_points = c.grid;
    const auto rows = figure3_rows(parse_list(c.beta), w, c.r, c.ebn0_linear, opts);
    write_header(out, c);
    out << "beta,gamma_async,gamma_sync,relative_gap\n";
    double max_gap = 0.0;
    for (const auto& row : rows) {
        if (!row.relative_gap) {
            log << "warning: beta " << row.load << ": Eb/N0 target not reachable\n";
        } else {
            max_gap = std::max(max_gap, *row.relative_gap);
        }
        out << format_double(row.load) << ',' << cell(row.gamma_async) << ',' << cell(row.gamma_sync) << ','
            << cell(row.relative_gap) << '\n';
    }
    log << "maximum relative gap " << format_double(max_gap) << '\n';
}

void cmd_montecarlo(const ExperimentConfig& c, std::ostream& out, std::ostream& log)
{
    const ChipWaveform w = parse_waveform(c.waveform);
    const double load = single_load(c);
    const std::size_t users = users_for(c, load);
    const PowerDelayLaw law = parse_delays(c.delays, parse_powers(c.powers), w.chip_interval());
    const FiniteSystemConfig fc = config_from_law(law, c.n, users, c.r, w, c.n0, parse_kind(c.kind));
    const FiniteModel model(fc);
    const std::vector<double> predicted = predicted_user_efficiencies(fc, c.grid);
    const TrialRun run = run_trials(model, c.trials, c.seed);

    double predicted_mean = 0.0;
    for (double p : predicted) {
        predicted_mean += p;
    }
    predicted_mean /= static_cast<double>(predicted.size());

    write_header(out, c);
    write_samples_csv(out, fc, run.samples, predicted);
    log << "K " << users << ", mean efficiency " << format_double(run.summary.mean_efficiency) << " +- "
        << format_double(run.summary.stderr_efficiency) << ", predicted " << format_double(predicted_mean)
        << ", relative deviation "
        << format_double(std::abs(run.summary.mean_efficiency - predicted_mean) / predicted_mean) << '\n';
}

void cmd_theorem3(const ExperimentConfig& c, std::ostream& out, std::ostream& log)
{
    Theorem3Config tc;
    tc.spreading_factor = c.n;
    tc.users = users_for(c, single_load(c));
    tc.oversampling = c.r;
    tc.waveform = parse_waveform(c.waveform);
    tc.window = c.window;
    tc.noise_density = c.n0;
    tc.delays = draw_symbol_delays(tc.users, tc.spreading_factor, tc.waveform.chip_interval(), c.seed);
    const Theorem3Result res = theorem3_harness(tc, c.trials, c.seed);

    write_header(out, c);
    out << "trial,user,delay_over_tc,sinr_general,sinr_reduced,efficiency_general,efficiency_reduced\n";
    for (std::size_t i = 0; i < res.general_samples.size(); ++i) {
        const auto& g = res.general_samples[i];
        const auto& r = res.reduced_samples[i];
        out << g.trial << ',' << g.user << ',' << format_double(tc.delays[g.user] / tc.waveform.chip_interval()) << ','
            << format_double(g.sinr) << ',' << format_double(r.sinr) << ',' << format_double(g.efficiency) << ','
            << format_double(r.efficiency) << '\n';
    }
    const double diff = std::abs(res.general.mean_sinr - res.reduced.mean_sinr);
    const double se = std::hypot(res.general.stderr_sinr, res.reduced.stderr_sinr);
    log << "general mean SINR " << format_double(res.general.mean_sinr) << " +- "
        << format_double(res.general.stderr_sinr) << ", reduced " << format_double(res.reduced.mean_sinr) << " +- "
        << format_double(res.reduced.stderr_sinr) << ", difference " << format_double(diff / se)
        << " combined standard errors\n";
}

} // namespace acdma::cli
