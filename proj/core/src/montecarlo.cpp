#include "acdma/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <random>

namespace acdma {

namespace {

constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

double efficiency_from(double sinr, double power, const FiniteSystemConfig& config)
{
    if (power == 0.0) {
        return 0.0;
    }
    return sinr * config.noise_density / (power * config.waveform.energy());
}

void check_delay(double tau, std::size_t n, double tc)
{
    if (!(tau >= 0.0) || !(tau < static_cast<double>(n) * tc)) {
        throw Error(ErrorCode::InvalidArgument, "delay must lie in [0, N Tc)");
    }
}

ComplexMatrix assemble_blocks(const std::vector<ComplexVector>& column_blocks, std::size_t n, int r, bool cyclic)
{
    // column_blocks[d] holds block offset d = p - q (cyclic: d in [0, N); otherwise d + N - 1).
    const auto rows = static_cast<Eigen::Index>(n) * r;
    ComplexMatrix phi = ComplexMatrix::Zero(rows, static_cast<Eigen::Index>(n));
    for (std::size_t q = 0; q < n; ++q) {
        for (std::size_t p = 0; p < n; ++p) {
            const long diff = static_cast<long>(p) - static_cast<long>(q);
            const std::size_t idx = cyclic ? static_cast<std::size_t>((diff + static_cast<long>(n)) % static_cast<long>(n))
                                           : static_cast<std::size_t>(diff + static_cast<long>(n) - 1);
            phi.block(static_cast<Eigen::Index>(p) * r, static_cast<Eigen::Index>(q), r, 1) = column_blocks[idx];
        }
    }
    return phi;
}

ComplexMatrix circulant_phi(const ChipWaveform& w, std::size_t n, int r, double tau)
{
    const double nd = static_cast<double>(n);
    std::vector<ComplexVector> conj_delta(n);
    std::vector<double> omega(n);
    for (std::size_t l = 0; l < n; ++l) {
        omega[l] = wrap_frequency(two_pi * static_cast<double>(l) / nd);
        conj_delta[l] = delta_vector(w, r, omega[l], tau).components.conjugate();
    }
    std::vector<ComplexVector> blocks(n, ComplexVector::Zero(r));
    for (std::size_t d = 0; d < n; ++d) {
        for (std::size_t l = 0; l < n; ++l) {
            blocks[d] += conj_delta[l] * std::polar(1.0 / nd, omega[l] * static_cast<double>(d));
        }
    }
    return assemble_blocks(blocks, n, r, true);
}

ComplexMatrix toeplitz_phi(const ChipWaveform& w, std::size_t n, int r, double tau)
{
    const PulseTimeDomain pulse(w);
    const double tc = w.chip_interval();
    const long nl = static_cast<long>(n);
    const double window = static_cast<double>(n - 1) * tc;

    std::vector<ComplexVector> blocks(2 * n - 1, ComplexVector::Zero(r));
    double peak = 0.0;
    double captured = 0.0;
    for (long d = -(nl - 1); d <= nl - 1; ++d) {
        ComplexVector& b = blocks[static_cast<std::size_t>(d + nl - 1)];
        for (int i = 0; i < r; ++i) {
            const double t = static_cast<double>(d) * tc - tau + static_cast<double>(i) * tc / r;
            b(i) = pulse(t);
            peak = std::max(peak, std::abs(b(i)));
            if (std::abs(t) <= window) {
                captured += std::norm(b(i));
            }
        }
    }
    captured *= tc / r;
    const double leaked = 1.0 - captured / w.energy();
    if (leaked > 1e-4) {
        throw Error(ErrorCode::PulseTooLong, "pulse energy outside |t| <= (N-1) Tc is " + std::to_string(leaked));
    }
    for (auto& b : blocks) {
        for (int i = 0; i < r; ++i) {
            if (std::abs(b(i)) < 1e-6 * peak) {
                b(i) = 0.0;
            }
        }
    }
    return assemble_blocks(blocks, n, r, false);
}

std::vector<SinrSample> sinr_from_gram_inverse(const ComplexMatrix& channel, double noise_variance,
                                               const std::vector<Eigen::Index>& columns)
{
    const auto k = channel.cols();
    ComplexMatrix gram = channel.adjoint() * channel;
    gram.diagonal().array() += noise_variance;
    const ComplexMatrix inv = hermitian_inverse(gram);
    std::vector<SinrSample> out;
    out.reserve(columns.size());
    for (Eigen::Index c : columns) {
        if (c < 0 || c >= k) {
            throw Error(ErrorCode::InvalidArgument, "column index out of range");
        }
        SinrSample s;
        s.user = static_cast<std::size_t>(c);
        s.sinr = std::max(0.0, 1.0 / (noise_variance * std::real(inv(c, c))) - 1.0);
        out.push_back(s);
    }
    return out;
}

TrialSummary finish_summary(const std::vector<double>& trial_sinr, const std::vector<double>& trial_eff)
{
    TrialSummary s;
    s.trials = trial_eff.size();
    const double t = static_cast<double>(s.trials);
    auto moments = [&](const std::vector<double>& v, double& mean, double& sd, double& se) {
        mean = 0.0;
        for (double x : v) {
            mean += x;
        }
        mean /= t;
        double ss = 0.0;
        for (double x : v) {
            ss += (x - mean) * (x - mean);
        }
        sd = s.trials > 1 ? std::sqrt(ss / (t - 1.0)) : 0.0;
        se = sd / std::sqrt(t);
    };
    moments(trial_sinr, s.mean_sinr, s.std_sinr, s.stderr_sinr);
    moments(trial_eff, s.mean_efficiency, s.std_efficiency, s.stderr_efficiency);
    return s;
}

} // namespace

const char* to_string(MatrixKind kind)
{
    return kind == MatrixKind::BlockToeplitz ? "block_toeplitz" : "block_circulant";
}

PulseTimeDomain::PulseTimeDomain(const ChipWaveform& waveform, std::size_t panels)
{
    if (panels == 0) {
        throw Error(ErrorCode::EmptyGrid, "pulse transform needs at least one panel");
    }
    const double edge = waveform.support_edge();
    const QuadratureRule rule = gauss_legendre(8);
    const double h = 2.0 * edge / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = -edge + (static_cast<double>(p) + 0.5) * h;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double w = mid + 0.5 * h * rule.nodes[i];
            omega_.push_back(w);
            weighted_.push_back(0.5 * h * rule.weights[i] * waveform.spectrum_or_zero(w) / two_pi);
        }
    }
}

cplx PulseTimeDomain::operator()(double t) const
{
    cplx acc = 0.0;
    for (std::size_t i = 0; i < omega_.size(); ++i) {
        acc += weighted_[i] * std::polar(1.0, omega_[i] * t);
    }
    return acc;
}

ComplexMatrix build_phi_matrix(const ChipWaveform& waveform, std::size_t n, int r, double tau, MatrixKind kind)
{
    if (n == 0) {
        throw Error(ErrorCode::InvalidArgument, "spreading factor must be positive");
    }
    check_oversampling(waveform, r);
    check_delay(tau, n, waveform.chip_interval());
    return kind == MatrixKind::BlockCirculant ? circulant_phi(waveform, n, r, tau) : toeplitz_phi(waveform, n, r, tau);
}

FiniteSystemConfig config_from_law(const PowerDelayLaw& law, std::size_t n, std::size_t k, int r,
                                   const ChipWaveform& waveform, double noise_density, MatrixKind kind)
{
    FiniteSystemConfig c;
    c.spreading_factor = n;
    c.users = k;
    c.oversampling = r;
    c.waveform = waveform;
    c.noise_density = noise_density;
    c.kind = kind;
    const auto& atoms = law.atoms();
    for (std::size_t u = 0; u < k; ++u) {
        const auto& a = atoms[u % atoms.size()];
        c.amplitudes.emplace_back(std::sqrt(a.power), 0.0);
        c.delays.push_back(a.delay);
    }
    return c;
}

FiniteModel::FiniteModel(FiniteSystemConfig config) : config_(std::move(config))
{
    const auto& c = config_;
    if (c.spreading_factor == 0 || c.users == 0) {
        throw Error(ErrorCode::InvalidArgument, "N and K must be positive");
    }
    if (c.amplitudes.size() != c.users || c.delays.size() != c.users) {
        throw Error(ErrorCode::InvalidArgument, "need one amplitude and one delay per user");
    }
    if (!(c.noise_density > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "noise density must be positive");
    }
    const double tc = c.waveform.chip_interval();
    std::map<double, std::shared_ptr<const ComplexMatrix>> cache;
    for (double tau : c.delays) {
        if (!(tau >= 0.0 && tau < tc)) {
            throw Error(ErrorCode::InvalidArgument, "chip-asynchronous delays must lie in [0, Tc)");
        }
        auto& slot = cache[tau];
        if (!slot) {
            slot = std::make_shared<const ComplexMatrix>(
                build_phi_matrix(c.waveform, c.spreading_factor, c.oversampling, tau, c.kind));
        }
        phi_.push_back(slot);
    }
}

ComplexMatrix draw_spreading(std::size_t n, std::size_t k, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5 / static_cast<double>(n)));
    ComplexMatrix s(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    for (Eigen::Index col = 0; col < s.cols(); ++col) {
        for (Eigen::Index row = 0; row < s.rows(); ++row) {
            const double re = normal(rng);
            const double im = normal(rng);
            s(row, col) = cplx(re, im);
        }
    }
    return s;
}

FiniteSystem FiniteModel::draw(std::uint64_t seed) const
{
    FiniteSystem sys;
    sys.config = config_;
    sys.seed = seed;
    sys.spreading = draw_spreading(config_.spreading_factor, config_.users, seed);
    const auto rows = static_cast<Eigen::Index>(config_.spreading_factor) * config_.oversampling;
    sys.channel.resize(rows, static_cast<Eigen::Index>(config_.users));
    for (std::size_t k = 0; k < config_.users; ++k) {
        const auto col = static_cast<Eigen::Index>(k);
        sys.channel.col(col) = config_.amplitudes[k] * (*phi_[k] * sys.spreading.col(col));
    }
    return sys;
}

SinrSample mmse_sinr(const FiniteSystem& system, std::size_t user)
{
    const ComplexMatrix& h = system.channel;
    const auto k = static_cast<Eigen::Index>(user);
    if (k >= h.cols()) {
        throw Error(ErrorCode::InvalidArgument, "user index out of range");
    }
    ComplexMatrix others(h.rows(), h.cols() - 1);
    others << h.leftCols(k), h.rightCols(h.cols() - k - 1);
    const double sigma2 = system.config.noise_variance();
    ComplexMatrix a = others * others.adjoint();
    a.diagonal().array() += sigma2;
    const ComplexVector hk = h.col(k);
    const ComplexVector x = hermitian_solve(a, hk);

    SinrSample s;
    s.user = user;
    s.seed = system.seed;
    s.sinr = std::max(0.0, std::real(hk.dot(x)));
    const double power = std::norm(system.config.amplitudes[user]);
    s.efficiency = efficiency_from(s.sinr, power, system.config);
    return s;
}

std::vector<SinrSample> mmse_sinr_all(const ComplexMatrix& channel, double noise_variance)
{
    std::vector<Eigen::Index> cols(static_cast<std::size_t>(channel.cols()));
    for (std::size_t i = 0; i < cols.size(); ++i) {
        cols[i] = static_cast<Eigen::Index>(i);
    }
    return sinr_from_gram_inverse(channel, noise_variance, cols);
}

std::vector<SinrSample> mmse_sinr_all(const FiniteSystem& system)
{
    auto out = mmse_sinr_all(system.channel, system.config.noise_variance());
    for (auto& s : out) {
        s.seed = system.seed;
        s.efficiency = efficiency_from(s.sinr, std::norm(system.config.amplitudes[s.user]), system.config);
    }
    return out;
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial)
{
    return master ^ ((static_cast<std::uint64_t>(trial) + 1) * golden_gamma);
}

TrialSummary summarize(const std::vector<SinrSample>& samples, std::size_t users)
{
    std::map<std::size_t, std::pair<double, double>> per_trial;
    std::map<std::size_t, std::size_t> per_trial_count;
    std::vector<double> user_sum(users, 0.0);
    std::vector<std::size_t> user_count(users, 0);
    for (const auto& s : samples) {
        auto& acc = per_trial[s.trial];
        acc.first += s.sinr;
        acc.second += s.efficiency;
        ++per_trial_count[s.trial];
        if (s.user < users) {
            user_sum[s.user] += s.efficiency;
            ++user_count[s.user];
        }
    }
    if (per_trial.empty()) {
        throw Error(ErrorCode::InvalidArgument, "no samples to summarize");
    }
    std::vector<double> trial_sinr;
    std::vector<double> trial_eff;
    for (const auto& [t, acc] : per_trial) {
        const double c = static_cast<double>(per_trial_count[t]);
        trial_sinr.push_back(acc.first / c);
        trial_eff.push_back(acc.second / c);
    }
    TrialSummary out = finish_summary(trial_sinr, trial_eff);
    out.per_user_efficiency.resize(users, 0.0);
    for (std::size_t u = 0; u < users; ++u) {
        if (user_count[u] > 0) {
            out.per_user_efficiency[u] = user_sum[u] / static_cast<double>(user_count[u]);
        }
    }
    return out;
}

TrialRun run_trials(const FiniteModel& model, std::size_t trials, std::uint64_t master_seed)
{
    if (trials == 0) {
        throw Error(ErrorCode::InvalidArgument, "need at least one trial");
    }
    TrialRun run;
    run.samples.reserve(trials * model.config().users);
    for (std::size_t t = 0; t < trials; ++t) {
        const FiniteSystem sys = model.draw(trial_seed(master_seed, t));
        for (auto& s : mmse_sinr_all(sys)) {
            s.trial = t;
            run.samples.push_back(s);
        }
    }
    run.summary = summarize(run.samples, model.config().users);
    return run;
}

std::vector<double> predicted_user_efficiencies(const FiniteSystemConfig& config, std::size_t grid_points,
                                                const FixedPointOptions& options)
{
    if (config.users == 0 || config.amplitudes.size() != config.users || config.delays.size() != config.users) {
        throw Error(ErrorCode::InvalidArgument, "need one amplitude and one delay per user");
    }
    const double tc = config.waveform.chip_interval();
    std::map<std::pair<double, double>, double> merged;
    const double w = 1.0 / static_cast<double>(config.users);
    for (std::size_t k = 0; k < config.users; ++k) {
        merged[{std::norm(config.amplitudes[k]), config.delays[k]}] += w;
    }
    std::vector<PowerDelayAtom> atoms;
    for (const auto& [key, weight] : merged) {
        atoms.push_back({key.first, key.second, weight});
    }
    const SystemLaw sys{static_cast<double>(config.users) / static_cast<double>(config.spreading_factor),
                        config.noise_density, config.oversampling, config.waveform,
                        PowerDelayLaw::from_atoms(atoms, tc)};
    const UpsilonSolution solution = solve_upsilon(sys, FrequencyGrid(grid_points), options);
    if (!solution.report.converged) {
        throw Error(ErrorCode::NonConvergence, "matrix fixed point did not converge");
    }
    std::map<std::pair<double, double>, double> per_atom;
    for (const auto& a : atoms) {
        per_atom[{a.power, a.delay}] =
            a.power == 0.0 ? 0.0 : efficiency_of_user(sinr_user(solution.field, sys, a.power, a.delay), a.power, sys);
    }
    std::vector<double> out;
    for (std::size_t k = 0; k < config.users; ++k) {
        out.push_back(per_atom[{std::norm(config.amplitudes[k]), config.delays[k]}]);
    }
    return out;
}

double predicted_mean_efficiency(const FiniteSystemConfig& config, std::size_t grid_points,
                                 const FixedPointOptions& options)
{
    const std::vector<double> per_user = predicted_user_efficiencies(config, grid_points, options);
    double acc = 0.0;
    for (double x : per_user) {
        acc += x;
    }
    return acc / static_cast<double>(per_user.size());
}

void write_samples_csv(std::ostream& out, const FiniteSystemConfig& config, const std::vector<SinrSample>& samples,
                       const std::vector<double>& predictions)
{
    const double tc = config.waveform.chip_interval();
    const bool with_prediction = !predictions.empty();
    if (with_prediction && predictions.size() != config.users) {
        throw Error(ErrorCode::InvalidArgument, "need one prediction per user");
    }
    out << "trial,user,delay_over_tc,power,sinr,efficiency" << (with_prediction ? ",predicted_efficiency" : "") << '\n';
    const auto old_precision = out.precision(17);
    for (const auto& s : samples) {
        out << s.trial << ',' << s.user << ',' << config.delays[s.user] / tc << ','
            << std::norm(config.amplitudes[s.user]) << ',' << s.sinr << ',' << s.efficiency;
        if (with_prediction) {
            out << ',' << predictions[s.user];
        }
        out << '\n';
    }
    out.precision(old_precision);
}

std::vector<double> draw_symbol_delays(std::size_t users, std::size_t n, double chip_interval, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, static_cast<double>(n) * chip_interval);
    std::vector<double> delays(users);
    for (auto& d : delays) {
        d = uniform(rng);
    }
    return delays;
}

Theorem3Result theorem3_harness(const Theorem3Config& config, std::size_t trials, std::uint64_t master_seed)
{
    const std::size_t n = config.spreading_factor;
    const std::size_t k = config.users;
    const int r = config.oversampling;
    const std::size_t m_half = config.window;
    const double tc = config.waveform.chip_interval();
    if (m_half < 2) {
        throw Error(ErrorCode::InvalidArgument, "window must span at least 2 symbols on each side");
    }
    if (trials == 0 || n == 0 || k == 0) {
        throw Error(ErrorCode::InvalidArgument, "need positive trials, N and K");
    }
    if (config.delays.size() != k) {
        throw Error(ErrorCode::InvalidArgument, "need one delay per user");
    }
    check_oversampling(config.waveform, r);

    std::vector<std::size_t> whole(k);
    std::vector<double> frac(k);
    for (std::size_t u = 0; u < k; ++u) {
        check_delay(config.delays[u], n, tc);
        whole[u] = static_cast<std::size_t>(std::floor(config.delays[u] / tc));
        frac[u] = config.delays[u] - static_cast<double>(whole[u]) * tc;
        if (frac[u] >= tc) {
            frac[u] = 0.0;
            ++whole[u];
        }
    }

    FiniteSystemConfig reduced_config;
    reduced_config.spreading_factor = n;
    reduced_config.users = k;
    reduced_config.oversampling = r;
    reduced_config.waveform = config.waveform;
    reduced_config.amplitudes.assign(k, cplx(1.0, 0.0));
    reduced_config.delays = frac;
    reduced_config.noise_density = config.noise_density;
    const FiniteModel reduced(reduced_config);
    const double sigma2 = reduced_config.noise_variance();

    const std::size_t symbols = 2 * m_half + 1;
    const auto block = static_cast<Eigen::Index>(n) * r;
    const auto rows = static_cast<Eigen::Index>(symbols + 1) * block;
    std::vector<Eigen::Index> centre(k);
    for (std::size_t u = 0; u < k; ++u) {
        centre[u] = static_cast<Eigen::Index>(m_half * k + u);
    }

    Theorem3Result out;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::uint64_t seed = trial_seed(master_seed, t);
        const FiniteSystem reduced_draw = reduced.draw(seed);
        for (auto s : mmse_sinr_all(reduced_draw)) {
            s.trial = t;
            out.reduced_samples.push_back(s);
        }

        ComplexMatrix general = ComplexMatrix::Zero(rows, static_cast<Eigen::Index>(symbols * k));
        for (std::size_t m = 0; m < symbols; ++m) {
            const ComplexMatrix spreading =
                m == m_half ? reduced_draw.spreading : draw_spreading(n, k, trial_seed(seed, m));
            for (std::size_t u = 0; u < k; ++u) {
                const Eigen::Index row0 = static_cast<Eigen::Index>(m) * block + static_cast<Eigen::Index>(whole[u]) * r;
                general.block(row0, static_cast<Eigen::Index>(m * k + u), block, 1) =
                    reduced.phi(u) * spreading.col(static_cast<Eigen::Index>(u));
            }
        }
        auto samples = sinr_from_gram_inverse(general, sigma2, centre);
        for (std::size_t u = 0; u < k; ++u) {
            SinrSample s = samples[u];
            s.trial = t;
            s.user = u;
            s.seed = seed;
            s.efficiency = efficiency_from(s.sinr, 1.0, reduced_config);
            out.general_samples.push_back(s);
        }
    }
    out.general = summarize(out.general_samples, k);
    out.reduced = summarize(out.reduced_samples, k);
    return out;
}

} // namespace acdma
