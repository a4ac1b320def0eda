// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "acdma/capacity.hpp"
#include "acdma/montecarlo.hpp"

using namespace acdma;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Outcome alpha_one_equivalence()
{
    double worst = 0.0;
    for (double load : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        for (double n0 : {0.01, 0.1, 1.0}) {
            worst = std::max(worst, std::abs(solve_efficiency_sinc(load, 1.0, equal_powers(), n0)
                                             - solve_efficiency_sync(load, equal_powers(), n0)));
        }
    }
    return {worst <= 1e-8, fmt("max |diff| %.3g (tol 1e-8)", worst)};
}

Outcome sinc_scaling()
{
    double worst = 0.0;
    for (double alpha : {0.5, 1.0, 2.0}) {
        const ChipWaveform w = ChipWaveform::sinc(alpha);
        for (double load : {0.5, 1.0, 2.0}) {
            const SystemLaw sys{load, 0.1, w.min_oversampling(), w,
                                PowerDelayLaw::uniform_delays(equal_powers(), 8, 1.0)};
            worst = std::max(worst, rel(capacity_constrained(sys), alpha * capacity_sync_closed_form(load / alpha, 10.0)));
        }
    }
    return {worst <= 1e-4, fmt("max relative error %.3g (tol 1e-4)", worst)};
}

Outcome matrix_scalar_consistency()
{
    const ChipWaveform rrc = ChipWaveform::root_raised_cosine(0.22);
    const SystemLaw sys{1.0, 0.1, 2, rrc, PowerDelayLaw::uniform_delays(equal_powers(), 64, 1.0)};
    const UpsilonSolution s = solve_upsilon(sys, FrequencyGrid(512));
    const double matrix = mean_efficiency(s.field, sys);
    const double scalar = solve_efficiency_scalar(sys).scalar;
    const double e = rel(matrix, scalar);
    return {s.report.converged && e <= 1e-3,
            fmt("matrix %.10f scalar %.10f relative %.3g (tol 1e-3)", matrix, scalar, e)};
}

double matrix_eta(const ChipWaveform& w, const PowerDelayLaw& law)
{
    const SystemLaw sys{1.0, 0.1, w.min_oversampling(), w, law};
    const UpsilonSolution s = solve_upsilon(sys, FrequencyGrid(256));
    if (!s.report.converged) {
        throw Error(ErrorCode::NonConvergence, "matrix fixed point did not converge");
    }
    return mean_efficiency(s.field, sys);
}

Outcome delay_independence()
{
    const ChipWaveform rrc = ChipWaveform::root_raised_cosine(0.22);
    std::vector<double> om;
    std::vector<cplx> val;
    for (int i = 0; i <= 1000; ++i) {
        const double x = -pi + two_pi * i / 1000.0;
        om.push_back(x);
        val.push_back(rrc.spectrum(x));
    }
    const ChipWaveform clipped = ChipWaveform::tabulated(om, val);
    double worst = 0.0;
    for (const auto& w : {ChipWaveform::sinc(1.0), clipped}) {
        const double zero = matrix_eta(w, PowerDelayLaw::point_delay(equal_powers(), 0.0, 1.0));
        const double uniform = matrix_eta(w, PowerDelayLaw::uniform_delays(equal_powers(), 16, 1.0));
        worst = std::max(worst, std::abs(zero - uniform));
    }
    return {worst <= 1e-6, fmt("max |diff| %.3g (tol 1e-6)", worst)};
}

Outcome monte_carlo_convergence()
{
    const auto law = PowerDelayLaw::uniform_delays(equal_powers(), 64, 1.0);
    const FiniteSystemConfig cfg = config_from_law(law, 128, 64, 2, ChipWaveform::root_raised_cosine(0.22), 0.1);
    const TrialRun run = run_trials(FiniteModel(cfg), 200, 12345);
    const double predicted = predicted_mean_efficiency(cfg);
    const double e = rel(run.summary.mean_efficiency, predicted);
    return {e <= 0.03, fmt("simulated %.5f +- %.5f predicted %.5f relative %.4f (tol 0.03)",
                           run.summary.mean_efficiency, run.summary.stderr_efficiency, predicted, e)};
}

Outcome delay_reduction()
{
    Theorem3Config cfg;
    cfg.delays = draw_symbol_delays(cfg.users, cfg.spreading_factor, 1.0, 777);
    const Theorem3Result r = theorem3_harness(cfg, 100, 777);
    const double diff = std::abs(r.general.mean_sinr - r.reduced.mean_sinr);
    const double bound = 2.0 * std::hypot(r.general.stderr_sinr, r.reduced.stderr_sinr);
    return {diff <= bound, fmt("general %.4f reduced %.4f |diff| %.4f bound %.4f", r.general.mean_sinr,
                               r.reduced.mean_sinr, diff, bound)};
}

ChipWaveform random_waveform(std::mt19937_64& rng, int r)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (r >= 2 && u(rng) < 0.5) {
        return ChipWaveform::root_raised_cosine(0.05 + 0.9 * u(rng));
    }
    return ChipWaveform::sinc(0.1 + (static_cast<double>(r) - 0.1) * u(rng));
}

Outcome trace_and_eigen_properties()
{
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g(0.0, 1.0);
    double trace = 0.0;
    double recon = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const int r = 1 + static_cast<int>(rng() % 4);
        const ChipWaveform w = random_waveform(rng, r);
        const double omega = -pi + two_pi * u(rng);
        const double tau = u(rng);
        ComplexMatrix b(r, r);
        std::vector<cplx> coef(static_cast<std::size_t>(r));
        for (auto& c : coef) {
            c = cplx(g(rng), g(rng));
        }
        for (int l = 0; l < r; ++l) {
            for (int k = 0; k < r; ++k) {
                b(l, k) = std::polar(1.0, (k - l) * omega / r) * coef[static_cast<std::size_t>(((k - l) % r + r) % r)];
            }
        }
        const QSplit q = q_split(w, r, omega, tau);
        trace = std::max(trace, std::abs((b * q.oscillating).trace()) / (b.norm() * std::max(1.0, q.full.norm())));

        const QEigen e = q_eigendecomposition(w, r, omega);
        const ComplexMatrix rebuilt = e.basis * e.diagonal.cast<cplx>().asDiagonal() * e.basis.adjoint();
        recon = std::max(recon, (rebuilt - q.delay_free).norm() / std::max(1.0, q.delay_free.norm()));
    }
    return {trace <= 1e-10 && recon <= 1e-10, fmt("trace %.3g reconstruction %.3g (tol 1e-10)", trace, recon)};
}

Outcome equal_power_root()
{
    const double n0 = 0.1;
    const double load = 1.0;
    const double b = n0 + load - 1.0;
    const double root = 0.5 * (-b + std::sqrt(b * b + 4.0 * n0));
    const double eta = solve_efficiency_sync(load, equal_powers(), n0);
    return {std::abs(eta - root) <= 1e-10, fmt("eta %.15f root %.15f", eta, root)};
}

Outcome figure_shapes()
{
    const double target = from_db(10.0);
    std::vector<double> alphas;
    for (double a = 0.25; a <= 2.0 + 1e-12; a += 0.125) {
        alphas.push_back(a);
    }
    const auto f2 = figure2_rows(alphas, 1.0, target);
    bool ok = true;
    for (std::size_t i = 0; i < f2.size(); ++i) {
        if (!f2[i].gamma_async || !f2[i].gamma_sync) {
            ok = false;
            continue;
        }
        if (i > 0 && f2[i - 1].gamma_async && !(*f2[i].gamma_async < *f2[i - 1].gamma_async)) {
            ok = false;
        }
        if (std::abs(f2[i].alpha - 1.0) < 1e-12 && rel(*f2[i].gamma_async, *f2[i].gamma_sync) > 1e-6) {
            ok = false;
        }
        if (f2[i].alpha > 1.0 + 1e-12 && !(*f2[i].gamma_async > *f2[i].gamma_sync)) {
            ok = false;
        }
    }
    std::vector<double> loads;
    for (double b = 0.25; b <= 8.0 + 1e-12; b += 0.25) {
        loads.push_back(b);
    }
    const auto f3 = figure3_rows(loads, ChipWaveform::root_raised_cosine(0.22), 2, target);
    double previous = 0.0;
    double max_gap = 0.0;
    for (const auto& row : f3) {
        if (!row.relative_gap || *row.relative_gap < 0.0 || *row.relative_gap < previous - 1e-9) {
            ok = false;
            continue;
        }
        previous = *row.relative_gap;
        max_gap = std::max(max_gap, *row.relative_gap);
    }
    const bool in_band = max_gap >= 0.10 && max_gap <= 0.14;
    return {ok, std::string(ok ? "shapes ok" : "shapes broken") + fmt("; max relative gap %.4f", max_gap)
                    + (in_band ? " inside" : " outside") + " soft band [0.10, 0.14]"};
}

Outcome limit_trend()
{
    const double target = from_db(10.0);
    bool ok = true;
    std::string detail;
    for (double alpha : {0.5, 2.0}) {
        const ChipWaveform w = ChipWaveform::sinc(alpha);
        double previous = 0.0;
        double ratio = 0.0;
        for (double load : {1.0, 2.0, 4.0, 8.0, 16.0}) {
            const auto cap = [&](double snr) {
                return capacity_constrained(SystemLaw{load, 1.0 / snr, w.min_oversampling(), w,
                                                      PowerDelayLaw::uniform_delays(equal_powers(), 8, 1.0)});
            };
            const double snr = snr_for_ebn0(target, load, cap);
            const double c = cap(snr);
            const double gamma = spectral_efficiency(c, w);
            if (gamma < previous) {
                ok = false;
            }
            previous = gamma;
            ratio = c / (alpha * std::log2(1.0 + load * snr / alpha));
        }
        ok = ok && ratio >= 0.9;
        detail += fmt("alpha %.2g: Gamma(16) %.4f, AWGN ratio %.4f; ", alpha, previous, ratio);
    }
    return {ok, detail + "(need nondecreasing and ratio >= 0.9)"};
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"alpha=1 sinc equals synchronous", alpha_one_equivalence},
        {"sinc capacity scaling identity", sinc_scaling},
        {"matrix and scalar solvers agree", matrix_scalar_consistency},
        {"sub-Nyquist delay independence", delay_independence},
        {"Monte Carlo converges to prediction", monte_carlo_convergence},
        {"whole-symbol delays reduce modulo Tc", delay_reduction},
        {"trace and eigen properties", trace_and_eigen_properties},
        {"equal-power closed form", equal_power_root},
        {"figure shapes", figure_shapes},
        {"wide-band limit trend", limit_trend},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %zu: %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%zu passed, %d failed\n", criteria.size() - static_cast<std::size_t>(failed), failed);
    return failed == 0 ? 0 : 1;
}
