#include "acdma/capacity.hpp"

#include <cmath>
#include <string>

namespace acdma {

namespace {

constexpr std::size_t uniform_delay_atoms = 64;

double constrained_integral(const SystemLaw& sys, std::size_t nodes, const ScalarSolveOptions& scalar)
{
    const double snr = sys.snr();
    const double energy = sys.waveform.energy();
    const PowerLaw powers = sys.law.power_marginal();
    const QuadratureRule rule = gauss_legendre(nodes);
    const double span = std::log1p(snr);

    double acc = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) {
        // gamma = exp(t) - 1 with t uniform in Gauss-Legendre sense on [0, log(1 + snr)].
        const double t = 0.5 * span * (rule.nodes[i] + 1.0);
        const double g = std::expm1(t);
        SystemLaw at_node = sys;
        at_node.noise_density = energy / g;
        double eta = 0.0;
        try {
            eta = solve_efficiency_scalar(at_node, scalar).scalar;
        } catch (const Error& e) {
            throw Error(e.code(), "at SNR node " + std::to_string(i) + " (snr " + std::to_string(g) + "): " + e.what());
        }
        double term = 0.0;
        for (const auto& p : powers) {
            term += p.weight * p.power * eta / (1.0 + p.power * g * eta);
        }
        acc += rule.weights[i] * term * (1.0 + g);
    }
    return sys.load / std::log(2.0) * 0.5 * span * acc;
}

} // namespace

double capacity_f(double y, double z)
{
    const double sz = std::sqrt(z);
    const double d = std::sqrt(y * (1.0 + sz) * (1.0 + sz) + 1.0) - std::sqrt(y * (1.0 - sz) * (1.0 - sz) + 1.0);
    return d * d;
}

double capacity_sync_closed_form(double load, double snr)
{
    if (!(load > 0.0) || !(snr >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "need load > 0 and snr >= 0");
    }
    if (snr == 0.0) {
        return 0.0;
    }
    const double f = capacity_f(snr, load);
    return load * std::log2(1.0 + snr - 0.25 * f) + std::log2(1.0 + load * snr - 0.25 * f)
           - std::log2(std::exp(1.0)) / (4.0 * snr) * f;
}

double capacity_constrained(const SystemLaw& sys, const CapacityOptions& options)
{
    validate(sys);
    if (options.initial_nodes < 2 || options.max_nodes < options.initial_nodes) {
        throw Error(ErrorCode::InvalidArgument, "invalid quadrature node limits");
    }
    if (sys.load == 0.0) {
        return 0.0;
    }
    if (!scalar_hypotheses_hold(sys)) {
        throw Error(ErrorCode::HypothesisViolated,
                    "need uniform delays independent of powers, or bandwidth B <= 1/(2 Tc)");
    }
    std::size_t nodes = options.initial_nodes;
    double current = constrained_integral(sys, nodes, options.scalar);
    while (2 * nodes - 1 <= options.max_nodes) {
        nodes = 2 * nodes - 1;
        const double next = constrained_integral(sys, nodes, options.scalar);
        const double change = std::abs(next - current);
        current = next;
        if (change <= options.relative_tolerance * std::abs(next)) {
            return next;
        }
    }
    throw Error(ErrorCode::NonConvergence,
                "capacity quadrature did not settle within " + std::to_string(options.max_nodes) + " nodes");
}

double spectral_efficiency(double capacity_per_chip, const ChipWaveform& waveform)
{
    const double tb = waveform.chip_interval() * waveform.bandwidth();
    if (!(tb > 0.0)) {
        throw Error(ErrorCode::ZeroBandwidth, "spectral efficiency needs B > 0");
    }
    return capacity_per_chip / tb;
}

double ebn0(double load, double snr, double capacity_per_chip)
{
    if (!(capacity_per_chip > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "Eb/N0 needs a positive capacity");
    }
    return load * snr / capacity_per_chip;
}

double snr_for_ebn0(double target_ebn0, double load, const std::function<double(double)>& capacity, double snr_min,
                    double snr_max)
{
    if (!(target_ebn0 > 0.0) || !(load > 0.0) || !(snr_min > 0.0) || !(snr_max > snr_min)) {
        throw Error(ErrorCode::InvalidArgument, "need positive Eb/N0, load and SNR range");
    }
    auto excess = [&](double log_snr) {
        const double snr = std::exp(log_snr);
        return std::log(ebn0(load, snr, capacity(snr)) / target_ebn0);
    };
    const double lo = std::log(snr_min);
    const double hi = std::log(snr_max);
    const double f_lo = excess(lo);
    const double f_hi = excess(hi);
    if (f_lo > 0.0 || f_hi < 0.0) {
        throw Error(ErrorCode::UnreachableEbN0,
                    "target " + std::to_string(to_db(target_ebn0)) + " dB is outside the reachable range");
    }
    return std::exp(bisect(excess, lo, hi, 1e-11));
}

CapacityResult make_capacity_result(double load, double snr, double capacity_per_chip, const ChipWaveform& waveform)
{
    CapacityResult out;
    out.capacity_per_chip = capacity_per_chip;
    out.spectral_efficiency = spectral_efficiency(capacity_per_chip, waveform);
    out.snr = snr;
    out.eb_n0 = capacity_per_chip > 0.0 ? ebn0(load, snr, capacity_per_chip) : 0.0;
    out.load = load;
    out.bandwidth_chip_product = waveform.chip_interval() * waveform.bandwidth();
    return out;
}

double capacity_uniform_delays(double load, double snr, const ChipWaveform& waveform, int oversampling,
                               const CapacityOptions& options)
{
    if (!(snr > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "snr must be positive");
    }
    SystemLaw sys{load, waveform.energy() / snr, oversampling, waveform,
                  PowerDelayLaw::uniform_delays(equal_powers(), uniform_delay_atoms, waveform.chip_interval())};
    return capacity_constrained(sys, options);
}

std::vector<Figure2Row> figure2_rows(const std::vector<double>& alphas, double load, double target_ebn0,
                                     const CapacityOptions& options)
{
    std::vector<Figure2Row> rows;
    std::optional<double> sync_capacity;
    double sync_snr = 0.0;
    try {
        auto c_sync = [&](double s) { return capacity_sync_closed_form(load, s); };
        sync_snr = snr_for_ebn0(target_ebn0, load, c_sync);
        sync_capacity = c_sync(sync_snr);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::UnreachableEbN0) {
            throw;
        }
    }
    for (double alpha : alphas) {
        Figure2Row row;
        row.alpha = alpha;
        const ChipWaveform w = ChipWaveform::sinc(alpha);
        const int r = std::max(1, static_cast<int>(std::ceil(alpha - 1e-12)));
        try {
            auto c_async = [&](double s) { return capacity_uniform_delays(load, s, w, r, options); };
            row.gamma_async = spectral_efficiency(c_async(snr_for_ebn0(target_ebn0, load, c_async)), w);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::UnreachableEbN0) {
                throw;
            }
        }
        if (sync_capacity) {
            row.gamma_sync = spectral_efficiency(*sync_capacity, w);
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<Figure3Row> figure3_rows(const std::vector<double>& loads, const ChipWaveform& waveform, int oversampling,
                                     double target_ebn0, const CapacityOptions& options)
{
    std::vector<Figure3Row> rows;
    for (double load : loads) {
        Figure3Row row;
        row.load = load;
        try {
            auto c_async = [&](double s) { return capacity_uniform_delays(load, s, waveform, oversampling, options); };
            row.gamma_async = spectral_efficiency(c_async(snr_for_ebn0(target_ebn0, load, c_async)), waveform);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::UnreachableEbN0) {
                throw;
            }
        }
        try {
            auto c_sync = [&](double s) { return capacity_sync_closed_form(load, s); };
            row.gamma_sync = spectral_efficiency(c_sync(snr_for_ebn0(target_ebn0, load, c_sync)), waveform);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::UnreachableEbN0) {
                throw;
            }
        }
        if (row.gamma_async && row.gamma_sync) {
            row.relative_gap = (*row.gamma_async - *row.gamma_sync) / *row.gamma_async;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace acdma
