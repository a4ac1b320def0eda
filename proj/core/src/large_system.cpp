#include "acdma/large_system.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace acdma {

namespace {

void check_power_law(const PowerLaw& powers)
{
    if (powers.empty()) {
        throw Error(ErrorCode::InvalidArgument, "power law has no atoms");
    }
    double total = 0.0;
    for (const auto& p : powers) {
        if (!(p.power >= 0.0) || !(p.weight > 0.0 && p.weight <= 1.0)) {
            throw Error(ErrorCode::InvalidArgument, "power atoms need power >= 0 and weight in (0, 1]");
        }
        total += p.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw Error(ErrorCode::InvalidArgument, "power weights must sum to 1");
    }
}

bool is_uniform_grid(const std::vector<double>& delays, const std::vector<double>& weights, double tc)
{
    const std::size_t n = delays.size();
    if (n < 2) {
        return false;
    }
    std::vector<double> sorted = delays;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(sorted[k] - tc * static_cast<double>(k) / static_cast<double>(n)) > 1e-12 * tc) {
            return false;
        }
        if (std::abs(weights[k] - 1.0 / static_cast<double>(n)) > 1e-12) {
            return false;
        }
    }
    return true;
}

double reduce_delay(double delay, double tc)
{
    double d = std::fmod(delay, tc);
    if (d < 0.0) {
        d += tc;
    }
    if (d >= tc) {
        d = 0.0;
    }
    return d;
}

/// Delta(Omega_m, tau) for every grid point.
std::vector<ComplexVector> delta_on_grid(const SystemLaw& sys, const FrequencyGrid& grid, double tau)
{
    std::vector<ComplexVector> out(grid.size());
    for (std::size_t m = 0; m < grid.size(); ++m) {
        out[m] = delta_vector(sys.waveform, sys.oversampling, grid[m], tau).components;
    }
    return out;
}

/// (1/2pi) integral Delta^H Upsilon Delta dOmega over the grid.
double quadratic_form(const std::vector<ComplexVector>& delta, const UpsilonField& field)
{
    double acc = 0.0;
    for (std::size_t m = 0; m < delta.size(); ++m) {
        acc += std::real(delta[m].dot(field.matrices[m] * delta[m]));
    }
    return acc * field.grid.spacing() / two_pi;
}

struct DelayGroups {
    std::vector<double> delays;
    std::vector<std::size_t> atom_group; // atom index -> delay index
};

DelayGroups group_by_delay(const PowerDelayLaw& law)
{
    DelayGroups g;
    g.delays = law.distinct_delays();
    for (const auto& a : law.atoms()) {
        const auto it = std::lower_bound(g.delays.begin(), g.delays.end(), a.delay);
        g.atom_group.push_back(static_cast<std::size_t>(it - g.delays.begin()));
    }
    return g;
}

/// beta sum_a w lambda Delta Delta^H / (1 + lambda c_a) at each grid point,
/// with c per delay group.
std::vector<double> group_coefficients(const SystemLaw& sys, const DelayGroups& groups, const std::vector<double>& c)
{
    std::vector<double> coeff(groups.delays.size(), 0.0);
    const auto& atoms = sys.law.atoms();
    for (std::size_t a = 0; a < atoms.size(); ++a) {
        const std::size_t d = groups.atom_group[a];
        coeff[d] += atoms[a].weight * atoms[a].power / (1.0 + atoms[a].power * c[d]);
    }
    for (double& x : coeff) {
        x *= sys.load;
    }
    return coeff;
}

} // namespace

PowerLaw equal_powers(double power)
{
    return {PowerAtom{power, 1.0}};
}

PowerDelayLaw::PowerDelayLaw(std::vector<PowerDelayAtom> atoms, double chip_interval, bool independent, bool uniform)
    : atoms_(std::move(atoms)), chip_interval_(chip_interval), independent_(independent), uniform_(uniform)
{
    if (!(chip_interval > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "chip interval must be positive");
    }
    if (atoms_.empty()) {
        throw Error(ErrorCode::InvalidArgument, "power/delay law has no atoms");
    }
    double total = 0.0;
    for (const auto& a : atoms_) {
        if (!(a.power >= 0.0) || !(a.weight > 0.0 && a.weight <= 1.0 + 1e-15)) {
            throw Error(ErrorCode::InvalidArgument, "atoms need power >= 0 and weight in (0, 1]");
        }
        if (!(a.delay >= 0.0 && a.delay < chip_interval)) {
            throw Error(ErrorCode::InvalidArgument, "atom delays must lie in [0, Tc)");
        }
        total += a.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw Error(ErrorCode::InvalidArgument, "atom weights must sum to 1");
    }
}

PowerDelayLaw PowerDelayLaw::uniform_delays(const PowerLaw& powers, std::size_t delay_atoms, double chip_interval)
{
    if (delay_atoms == 0) {
        throw Error(ErrorCode::InvalidArgument, "need at least one delay atom");
    }
    std::vector<double> delays(delay_atoms);
    std::vector<double> weights(delay_atoms, 1.0 / static_cast<double>(delay_atoms));
    for (std::size_t k = 0; k < delay_atoms; ++k) {
        delays[k] = chip_interval * static_cast<double>(k) / static_cast<double>(delay_atoms);
    }
    return independent(powers, delays, weights, chip_interval);
}

PowerDelayLaw PowerDelayLaw::independent(const PowerLaw& powers, const std::vector<double>& delays,
                                         const std::vector<double>& delay_weights, double chip_interval)
{
    check_power_law(powers);
    if (delays.empty() || delays.size() != delay_weights.size()) {
        throw Error(ErrorCode::InvalidArgument, "delay law needs matching delays and weights");
    }
    std::vector<PowerDelayAtom> atoms;
    atoms.reserve(powers.size() * delays.size());
    for (const auto& p : powers) {
        for (std::size_t k = 0; k < delays.size(); ++k) {
            atoms.push_back({p.power, delays[k], p.weight * delay_weights[k]});
        }
    }
    const bool uniform = is_uniform_grid(delays, delay_weights, chip_interval);
    return PowerDelayLaw(std::move(atoms), chip_interval, true, uniform);
}

PowerDelayLaw PowerDelayLaw::point_delay(const PowerLaw& powers, double delay, double chip_interval)
{
    return independent(powers, {delay}, {1.0}, chip_interval);
}

PowerDelayLaw PowerDelayLaw::from_atoms(std::vector<PowerDelayAtom> atoms, double chip_interval)
{
    return PowerDelayLaw(std::move(atoms), chip_interval, false, false);
}

PowerLaw PowerDelayLaw::power_marginal() const
{
    std::map<double, double> merged;
    for (const auto& a : atoms_) {
        merged[a.power] += a.weight;
    }
    PowerLaw out;
    for (const auto& [p, w] : merged) {
        out.push_back({p, w});
    }
    return out;
}

std::vector<double> PowerDelayLaw::distinct_delays() const
{
    std::vector<double> d;
    for (const auto& a : atoms_) {
        d.push_back(a.delay);
    }
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    return d;
}

void validate(const SystemLaw& sys)
{
    if (!(sys.load >= 0.0) || !std::isfinite(sys.load)) {
        throw Error(ErrorCode::InvalidArgument, "load must be nonnegative");
    }
    if (!(sys.noise_density > 0.0) || !std::isfinite(sys.noise_density)) {
        throw Error(ErrorCode::InvalidArgument, "noise density must be positive");
    }
    const double tc = sys.waveform.chip_interval();
    if (std::abs(sys.law.chip_interval() - tc) > 1e-12 * tc) {
        throw Error(ErrorCode::InvalidArgument, "law and waveform disagree on the chip interval");
    }
    check_oversampling(sys.waveform, sys.oversampling);
}

UpsilonSolution solve_upsilon(const SystemLaw& sys, const FrequencyGrid& grid, const FixedPointOptions& options)
{
    validate(sys);
    const int r = sys.oversampling;
    const std::size_t cells = static_cast<std::size_t>(r) * static_cast<std::size_t>(r);
    const DelayGroups groups = group_by_delay(sys.law);

    std::vector<std::vector<ComplexVector>> delta(groups.delays.size());
    for (std::size_t d = 0; d < groups.delays.size(); ++d) {
        delta[d] = delta_on_grid(sys, grid, groups.delays[d]);
    }

    const double sigma2 = sys.noise_variance();
    UpsilonField field{grid, std::vector<ComplexMatrix>(grid.size())};

    auto unpack = [&](const ComplexVector& state) {
        for (std::size_t m = 0; m < grid.size(); ++m) {
            field.matrices[m] = Eigen::Map<const ComplexMatrix>(state.data() + m * cells, r, r);
        }
    };

    auto map = [&](const ComplexVector& state) {
        unpack(state);
        std::vector<double> c(groups.delays.size());
        for (std::size_t d = 0; d < c.size(); ++d) {
            c[d] = quadratic_form(delta[d], field);
        }
        const std::vector<double> coeff = group_coefficients(sys, groups, c);
        ComplexVector next(state.size());
        for (std::size_t m = 0; m < grid.size(); ++m) {
            ComplexMatrix inv = sigma2 * ComplexMatrix::Identity(r, r);
            for (std::size_t d = 0; d < coeff.size(); ++d) {
                inv.noalias() += coeff[d] * delta[d][m] * delta[d][m].adjoint();
            }
            Eigen::Map<ComplexMatrix>(next.data() + m * cells, r, r) = hermitian_inverse(inv);
        }
        return next;
    };

    ComplexVector init(static_cast<Eigen::Index>(grid.size() * cells));
    for (std::size_t m = 0; m < grid.size(); ++m) {
        Eigen::Map<ComplexMatrix>(init.data() + m * cells, r, r) = ComplexMatrix::Identity(r, r) / sigma2;
    }

    auto [state, report] = fixed_point(map, std::move(init), options);
    unpack(state);
    return {std::move(field), report};
}

double sinr_user(const UpsilonField& field, const SystemLaw& sys, double power, double delay)
{
    const double tau = reduce_delay(delay, sys.waveform.chip_interval());
    return power * quadratic_form(delta_on_grid(sys, field.grid, tau), field);
}

double efficiency_of_user(double sinr, double power, const SystemLaw& sys)
{
    if (power == 0.0) {
        throw Error(ErrorCode::ZeroPower, "multiuser efficiency is undefined for a silent user");
    }
    return sinr * sys.noise_density / (power * sys.waveform.energy());
}

double mean_efficiency(const UpsilonField& field, const SystemLaw& sys)
{
    double acc = 0.0;
    double weight = 0.0;
    for (const auto& a : sys.law.atoms()) {
        if (a.power == 0.0) {
            continue;
        }
        acc += a.weight * efficiency_of_user(sinr_user(field, sys, a.power, a.delay), a.power, sys);
        weight += a.weight;
    }
    if (weight == 0.0) {
        throw Error(ErrorCode::ZeroPower, "every atom of the law has zero power");
    }
    return acc / weight;
}

ComplexMatrix interference_matrix(const UpsilonField& field, const SystemLaw& sys, std::size_t grid_index)
{
    const DelayGroups groups = group_by_delay(sys.law);
    std::vector<double> c(groups.delays.size());
    std::vector<ComplexVector> at_point(groups.delays.size());
    for (std::size_t d = 0; d < c.size(); ++d) {
        const auto delta = delta_on_grid(sys, field.grid, groups.delays[d]);
        c[d] = quadratic_form(delta, field);
        at_point[d] = delta[grid_index];
    }
    const std::vector<double> coeff = group_coefficients(sys, groups, c);
    const int r = sys.oversampling;
    ComplexMatrix out = ComplexMatrix::Zero(r, r);
    for (std::size_t d = 0; d < coeff.size(); ++d) {
        out += coeff[d] * at_point[d] * at_point[d].adjoint();
    }
    return out;
}

bool scalar_hypotheses_hold(const SystemLaw& sys)
{
    const bool uniform = sys.law.delays_uniform() && sys.law.powers_delays_independent();
    const bool narrow = 2.0 * sys.waveform.bandwidth() * sys.waveform.chip_interval() <= 1.0 + 1e-12;
    return uniform || narrow;
}

EfficiencySpectrum solve_efficiency_scalar(const SystemLaw& sys, const ScalarSolveOptions& options)
{
    validate(sys);
    if (!scalar_hypotheses_hold(sys)) {
        throw Error(ErrorCode::HypothesisViolated,
                    "need uniform delays independent of powers, or bandwidth B <= 1/(2 Tc)");
    }
    if (options.grid_points < 2) {
        throw Error(ErrorCode::EmptyGrid, "efficiency spectrum needs at least two frequencies");
    }

    const double tc = sys.waveform.chip_interval();
    const double energy = sys.waveform.energy();
    const double edge = sys.waveform.support_edge();
    const std::size_t n = options.grid_points;
    const double step = 2.0 * edge / static_cast<double>(n);

    EfficiencySpectrum out;
    out.omega.resize(n);
    std::vector<double> mag2(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out.omega[i] = -edge + (static_cast<double>(i) + 0.5) * step;
        mag2[i] = std::norm(sys.waveform.spectrum_or_zero(out.omega[i]));
        total += mag2[i] / energy;
    }
    total *= step / two_pi;
    // Quadrature energy, so that the unloaded density integrates to exactly one.
    const double grid_energy = total * energy;

    const PowerLaw powers = sys.law.power_marginal();
    const double noise = sys.noise_density / energy;

    // 1/eta(w) = E/|Phi|^2 + (beta/Tc) S(eta), written to stay finite where Phi = 0.
    auto interference = [&](double eta) {
        double s = 0.0;
        for (const auto& p : powers) {
            s += p.weight * p.power / (noise + p.power * eta);
        }
        return sys.load / tc * s;
    };
    auto density_at = [&](std::size_t i, double load_term) {
        return mag2[i] / (grid_energy + mag2[i] * load_term);
    };
    auto integrated = [&](double eta) {
        const double load_term = interference(eta);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += density_at(i, load_term);
        }
        return acc * step / two_pi;
    };

    double eta = 0.0;
    if (options.init) {
        auto [value, report] = fixed_point(integrated, *options.init, options.fixed_point);
        eta = value;
        out.report = report;
    } else {
        std::size_t evaluations = 0;
        auto excess = [&](double x) {
            ++evaluations;
            return x - integrated(x);
        };
        eta = bisect(excess, 0.0, 1.0 + 1e-9, 1e-15);
        out.report.iterations = evaluations;
        out.report.final_residual = std::abs(eta - integrated(eta));
        out.report.converged = out.report.final_residual <= options.fixed_point.tolerance;
        out.report.damping_used = 1.0;
    }

    const double load_term = interference(eta);
    out.density.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.density[i] = density_at(i, load_term);
    }
    out.scalar = integrate_periodic(out.density, step) / two_pi;
    return out;
}

double solve_efficiency_sinc(double load, double alpha, const PowerLaw& powers, double noise_density)
{
    if (!(alpha > 0.0) || !(load >= 0.0) || !(noise_density > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "need alpha > 0, load >= 0 and N0 > 0");
    }
    check_power_law(powers);
    const double ratio = load / alpha;
    // eta (1 + (beta/alpha) S(eta)) - 1 is strictly increasing on [0, 1].
    auto f = [&](double eta) {
        double s = 0.0;
        for (const auto& p : powers) {
            s += p.weight * p.power / (noise_density + p.power * eta);
        }
        return eta * (1.0 + ratio * s) - 1.0;
    };
    return bisect(f, 0.0, 1.0, 1e-16);
}

double solve_efficiency_sync(double load, const PowerLaw& powers, double noise_density)
{
    return solve_efficiency_sinc(load, 1.0, powers, noise_density);
}

double effective_interference_density(double p_self, double p_other, double sinr)
{
    const double denom = p_self + p_other * sinr;
    if (denom == 0.0) {
        return 0.0;
    }
    return p_self * p_other / denom;
}

double sinr_spectral_density(const SystemLaw& sys, double power, double sinr, double omega)
{
    const double tc = sys.waveform.chip_interval();
    const double mag2 = std::norm(sys.waveform.spectrum_or_zero(omega));
    const double p_self = power * mag2 / tc;
    if (p_self == 0.0) {
        return 0.0;
    }
    double interference = 0.0;
    for (const auto& p : sys.law.power_marginal()) {
        interference += p.weight * effective_interference_density(p_self, p.power * mag2 / tc, sinr);
    }
    return p_self / (sys.noise_density + sys.load * interference);
}

} // namespace acdma
