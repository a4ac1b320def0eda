#include <catch_amalgamated.hpp>

#include <random>

#include "acdma/large_system.hpp"

using namespace acdma;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an acdma::Error");
    return ErrorCode::Io;
}

double quadratic_root(double load, double n0)
{
    const double b = n0 + load - 1.0;
    return 0.5 * (-b + std::sqrt(b * b + 4.0 * n0));
}

SystemLaw make(double load, double n0, int r, const ChipWaveform& w, const PowerDelayLaw& law)
{
    return SystemLaw{load, n0, r, w, law};
}

double matrix_eta(const SystemLaw& sys, std::size_t grid = 256)
{
    const UpsilonSolution s = solve_upsilon(sys, FrequencyGrid(grid));
    REQUIRE(s.report.converged);
    return mean_efficiency(s.field, sys);
}

} // namespace

TEST_CASE("power/delay law construction")
{
    const PowerDelayLaw u = PowerDelayLaw::uniform_delays({{1.0, 0.5}, {2.0, 0.5}}, 4, 2.0);
    CHECK(u.atoms().size() == 8);
    CHECK(u.delays_uniform());
    CHECK(u.powers_delays_independent());
    CHECK(u.distinct_delays() == std::vector<double>{0.0, 0.5, 1.0, 1.5});
    CHECK(u.power_marginal().size() == 2);

    const PowerDelayLaw p = PowerDelayLaw::point_delay(equal_powers(), 0.3, 1.0);
    CHECK_FALSE(p.delays_uniform());
    CHECK(p.powers_delays_independent());
    CHECK_FALSE(PowerDelayLaw::uniform_delays(equal_powers(), 1, 1.0).delays_uniform());

    const PowerDelayLaw j = PowerDelayLaw::from_atoms({{1.0, 0.0, 0.25}, {2.0, 0.5, 0.75}}, 1.0);
    CHECK_FALSE(j.powers_delays_independent());
    CHECK_FALSE(j.delays_uniform());

    CHECK(code_of([] { PowerDelayLaw::from_atoms({{1.0, 0.0, 0.5}}, 1.0); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { PowerDelayLaw::point_delay(equal_powers(), 1.0, 1.0); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { PowerDelayLaw::from_atoms({{-1.0, 0.0, 1.0}}, 1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("system validation")
{
    const ChipWaveform rrc = ChipWaveform::root_raised_cosine(0.22);
    const auto law = PowerDelayLaw::uniform_delays(equal_powers(), 8, 1.0);
    CHECK(code_of([&] { validate(make(1.0, 0.1, 1, rrc, law)); }) == ErrorCode::UndersampledConfiguration);
    CHECK(code_of([&] { validate(make(-1.0, 0.1, 2, rrc, law)); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { validate(make(1.0, 0.0, 2, rrc, law)); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { validate(make(1.0, 0.1, 2, ChipWaveform::root_raised_cosine(0.22, 2.0), law)); })
          == ErrorCode::InvalidArgument);
    const SystemLaw ok = make(1.0, 0.1, 2, rrc, law);
    CHECK_NOTHROW(validate(ok));
    CHECK_THAT(ok.noise_variance(), WithinRel(0.2, 1e-15));
    CHECK_THAT(ok.snr(), WithinRel(10.0, 1e-15));
}

TEST_CASE("matrix fixed point at zero load is the noise inverse")
{
    const ChipWaveform rrc = ChipWaveform::root_raised_cosine(0.22);
    const SystemLaw sys = make(0.0, 0.1, 2, rrc, PowerDelayLaw::uniform_delays(equal_powers(), 4, 1.0));
    const UpsilonSolution s = solve_upsilon(sys, FrequencyGrid(64));
    CHECK(s.report.converged);
    for (const auto& m : s.field.matrices) {
        CHECK((m - ComplexMatrix::Identity(2, 2) / sys.noise_variance()).norm() < 1e-14);
    }
}

TEST_CASE("single-user SINR and efficiency")
{
    const ChipWaveform sinc = ChipWaveform::sinc(1.0);
    const SystemLaw sys = make(0.0, 0.1, 1, sinc, PowerDelayLaw::point_delay(equal_powers(), 0.0, 1.0));
    const UpsilonSolution s = solve_upsilon(sys, FrequencyGrid(32));
    for (double lambda : {0.5, 1.0, 3.0}) {
        const double sinr = sinr_user(s.field, sys, lambda, 0.4);
        CHECK_THAT(sinr, WithinRel(lambda * sinc.energy() / 0.1, 1e-13));
        CHECK_THAT(efficiency_of_user(sinr, lambda, sys), WithinRel(1.0, 1e-13));
    }
    CHECK(sinr_user(s.field, sys, 0.0, 0.1) == 0.0);
    CHECK(efficiency_of_user(0.0, 1.0, sys) == 0.0);
    CHECK(code_of([&] { efficiency_of_user(1.0, 0.0, sys); }) == ErrorCode::ZeroPower);
}

TEST_CASE("SINR functional is linear in power and periodic in delay")
{
    const ChipWaveform rrc = ChipWaveform::root_raised_cosine(0.22);
    const SystemLaw sys = make(1.0, 0.1, 2, rrc, PowerDelayLaw::point_delay(equal_powers(), 0.25, 1.0));
    const UpsilonSolution s = solve_upsilon(sys, FrequencyGrid(128));
    REQUIRE(s.report.converged);
    const double one = sinr_user(s.field, sys, 1.0, 0.6);
    CHECK_THAT(sinr_user(s.field, sys, 2.5, 0.6), WithinRel(2.5 * one, 1e-13));
    CHECK_THAT(sinr_user(s.field, sys, 1.0, 3.6), WithinRel(one, 1e-12));
    CHECK_THAT(sinr_user(s.field, sys, 1.0, -0.4), WithinRel(one, 1e-12));
}

TEST_CASE("Upsilon is Hermitian positive definite and bounded by the noise inverse")
{
    const ChipWaveform rrc = ChipWaveform::root_raised_cosine(0.5);
    const SystemLaw sys = make(2.0, 0.05, 2, rrc,
                               PowerDelayLaw::from_atoms({{1.0, 0.0, 0.5}, {4.0, 0.3, 0.25}, {0.5, 0.8, 0.25}}, 1.0));
    const UpsilonSolution s = solve_upsilon(sys, FrequencyGrid(128));
    REQUIRE(s.report.converged);
    for (const auto& m : s.field.matrices) {
        CHECK(is_hermitian(m, 1e-12));
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(m);
        CHECK(eig.eigenvalues().minCoeff() > 0.0);
        CHECK(eig.eigenvalues().maxCoeff() <= 1.0 / sys.noise_variance() + 1e-9);
    }
}

TEST_CASE("chip-synchronous sinc matches the synchronous baseline")
{
    const ChipWaveform sinc = ChipWaveform::sinc(1.0);
    for (double load : {0.5, 1.0, 2.0}) {
        const SystemLaw sys = make(load, 0.1, 1, sinc, PowerDelayLaw::point_delay(equal_powers(), 0.0, 1.0));
        CHECK_THAT(matrix_eta(sys, 64), WithinAbs(solve_efficiency_sync(load, equal_powers(), 0.1), 1e-6));
    }
}

TEST_CASE("point-mass delays give a rank-one interference matrix")
{
    const ChipWaveform rrc = ChipWaveform::root_raised_cosine(0.22);
    const SystemLaw sys = make(1.0, 0.1, 2, rrc, PowerDelayLaw::point_delay({{1.0, 0.5}, {3.0, 0.5}}, 0.4, 1.0));
    const UpsilonSolution s = solve_upsilon(sys, FrequencyGrid(64));
    REQUIRE(s.report.converged);
    for (std::size_t m = 0; m < s.field.grid.size(); m += 7) {
        const ComplexMatrix im = interference_matrix(s.field, sys, m);
        Eigen::JacobiSVD<ComplexMatrix> svd(im);
        CHECK(svd.singularValues()(1) <= 1e-10 * svd.singularValues()(0));
        const ComplexMatrix reconstructed =
            hermitian_inverse(im + sys.noise_variance() * ComplexMatrix::Identity(2, 2));
        CHECK((reconstructed - s.field.matrices[m]).norm() < 1e-8 * s.field.matrices[m].norm());
    }
}

TEST_CASE("sub-Nyquist pulses are delay independent")
{
    // Raised-cosine-like tabulated pulse clipped to |omega| <= pi / Tc.
    std::vector<double> om;
    std::vector<cplx> val;
    for (int i = 0; i <= 400; ++i) {
        const double x = -pi + two_pi * i / 400.0;
        om.push_back(x);
        val.emplace_back(std::cos(0.45 * x), 0.0);
    }
    const ChipWaveform clipped = ChipWaveform::tabulated(om, val);
    REQUIRE(clipped.bandwidth() <= 0.5 + 1e-12);
    for (const auto& w : {ChipWaveform::sinc(1.0), ChipWaveform::sinc(0.6), clipped}) {
        const double zero = matrix_eta(make(1.0, 0.1, 1, w, PowerDelayLaw::point_delay(equal_powers(), 0.0, 1.0)), 128);
        const double uniform =
            matrix_eta(make(1.0, 0.1, 1, w, PowerDelayLaw::uniform_delays(equal_powers(), 16, 1.0)), 128);
        const double arbitrary = matrix_eta(
            make(1.0, 0.1, 2, w, PowerDelayLaw::from_atoms({{1.0, 0.1, 0.3}, {1.0, 0.77, 0.7}}, 1.0)), 128);
        CHECK_THAT(uniform, WithinRel(zero, 1e-6));
        CHECK_THAT(arbitrary, WithinRel(zero, 1e-6));
    }
}

TEST_CASE("scalar efficiency examples")
{
    const ChipWaveform rrc = ChipWaveform::root_raised_cosine(0.22);
    const auto uniform = PowerDelayLaw::uniform_delays(equal_powers(), 64, 1.0);

    const EfficiencySpectrum free = solve_efficiency_scalar(make(0.0, 0.1, 2, rrc, uniform));
    CHECK_THAT(free.scalar, WithinAbs(1.0, 1e-6));
    for (std::size_t i = 0; i < free.omega.size(); ++i) {
        CHECK_THAT(free.density[i], WithinRel(std::norm(rrc.spectrum(free.omega[i])) / rrc.energy(), 1e-6));
    }

    const ChipWaveform sinc = ChipWaveform::sinc(1.0);
    const EfficiencySpectrum s = solve_efficiency_scalar(make(1.0, 0.1, 1, sinc, uniform));
    CHECK_THAT(s.scalar, WithinAbs(quadratic_root(1.0, 0.1), 1e-10));

    for (double alpha : {0.5, 1.3, 2.0}) {
        const ChipWaveform w = ChipWaveform::sinc(alpha);
        const EfficiencySpectrum sa = solve_efficiency_scalar(make(1.5, 0.2, w.min_oversampling(), w, uniform));
        const double root = solve_efficiency_sinc(1.5, alpha, equal_powers(), 0.2);
        CHECK_THAT(sa.scalar, WithinAbs(root, 1e-10));
        for (double d : sa.density) {
            CHECK_THAT(d, WithinAbs(root / alpha, 1e-10));
        }
    }
}

TEST_CASE("scalar density satisfies its pointwise equation")
{
    const ChipWaveform rrc = ChipWaveform::root_raised_cosine(0.22);
    const PowerLaw powers{{0.5, 0.5}, {1.5, 0.5}};
    const SystemLaw sys = make(1.2, 0.1, 2, rrc, PowerDelayLaw::uniform_delays(powers, 16, 1.0));
    const EfficiencySpectrum s = solve_efficiency_scalar(sys);
    double sum = 0.0;
    for (const auto& p : powers) {
        sum += p.weight * p.power / (0.1 + p.power * s.scalar);
    }
    double grid_energy = 0.0;
    for (double w : s.omega) {
        grid_energy += std::norm(rrc.spectrum(w));
    }
    grid_energy *= (s.omega[1] - s.omega[0]) / two_pi;
    CHECK_THAT(grid_energy, WithinAbs(1.0, 1e-5));
    for (std::size_t i = 0; i < s.omega.size(); ++i) {
        const double mag2 = std::norm(rrc.spectrum(s.omega[i]));
        if (mag2 == 0.0) {
            CHECK(s.density[i] == 0.0);
            continue;
        }
        CHECK_THAT(1.0 / s.density[i], WithinRel(grid_energy / mag2 + 1.2 * sum, 1e-12));
    }
    CHECK(s.scalar > 0.0);
    CHECK(s.scalar <= 1.0);
}

TEST_CASE("scalar solver from random starting points")
{
    const ChipWaveform rrc = ChipWaveform::root_raised_cosine(0.22);
    const SystemLaw sys = make(1.0, 0.1, 2, rrc, PowerDelayLaw::uniform_delays(equal_powers(), 64, 1.0));
    const double reference = solve_efficiency_scalar(sys).scalar;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10; ++i) {
        ScalarSolveOptions opts;
        opts.init = u(rng);
        opts.fixed_point.tolerance = 1e-13;
        const EfficiencySpectrum s = solve_efficiency_scalar(sys, opts);
        CHECK(s.report.converged);
        CHECK_THAT(s.scalar, WithinAbs(reference, 1e-9));
    }
}

TEST_CASE("scalar solver hypotheses")
{
    const ChipWaveform rrc = ChipWaveform::root_raised_cosine(0.22);
    const SystemLaw point = make(1.0, 0.1, 2, rrc, PowerDelayLaw::point_delay(equal_powers(), 0.3, 1.0));
    CHECK_FALSE(scalar_hypotheses_hold(point));
    CHECK(code_of([&] { solve_efficiency_scalar(point); }) == ErrorCode::HypothesisViolated);
    const SystemLaw joint = make(1.0, 0.1, 2, rrc, PowerDelayLaw::from_atoms({{1.0, 0.0, 0.5}, {2.0, 0.5, 0.5}}, 1.0));
    CHECK(code_of([&] { solve_efficiency_scalar(joint); }) == ErrorCode::HypothesisViolated);
    const SystemLaw narrow =
        make(1.0, 0.1, 1, ChipWaveform::sinc(0.8), PowerDelayLaw::point_delay(equal_powers(), 0.3, 1.0));
    CHECK(scalar_hypotheses_hold(narrow));
}

TEST_CASE("matrix and scalar solvers agree under uniform delays")
{
    const ChipWaveform rrc = ChipWaveform::root_raised_cosine(0.22);
    const SystemLaw sys = make(1.0, 0.1, 2, rrc, PowerDelayLaw::uniform_delays({{0.5, 0.5}, {2.0, 0.5}}, 16, 1.0));
    CHECK_THAT(matrix_eta(sys, 256), WithinRel(solve_efficiency_scalar(sys).scalar, 1e-3));
}

TEST_CASE("efficiency decreases with load")
{
    const ChipWaveform rrc = ChipWaveform::root_raised_cosine(0.22);
    double previous = 1.0 + 1e-9;
    for (double load : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
        const double eta =
            solve_efficiency_scalar(make(load, 0.1, 2, rrc, PowerDelayLaw::uniform_delays(equal_powers(), 8, 1.0))).scalar;
        CHECK(eta <= previous);
        previous = eta;
    }
}

TEST_CASE("sinc and synchronous efficiencies")
{
    CHECK(solve_efficiency_sinc(0.0, 1.7, equal_powers(), 0.3) == 1.0);
    CHECK(solve_efficiency_sync(0.0, equal_powers(), 0.3) == 1.0);
    CHECK_THAT(solve_efficiency_sync(1.0, equal_powers(), 0.1), WithinAbs(quadratic_root(1.0, 0.1), 1e-10));
    CHECK_THAT(solve_efficiency_sinc(1.0, 2.0, equal_powers(), 0.1),
               WithinAbs(solve_efficiency_sinc(0.5, 1.0, equal_powers(), 0.1), 1e-14));

    const PowerLaw two{{0.5, 0.5}, {1.5, 0.5}};
    const double eta = solve_efficiency_sync(1.0, two, 0.1);
    const double rhs = 1.0 / (1.0 + 0.5 * 0.5 / (0.1 + 0.5 * eta) + 0.5 * 1.5 / (0.1 + 1.5 * eta));
    CHECK_THAT(eta - rhs, WithinAbs(0.0, 1e-10));

    CHECK(code_of([] { solve_efficiency_sinc(1.0, 0.0, equal_powers(), 0.1); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { solve_efficiency_sync(1.0, {{1.0, 0.4}}, 0.1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("effective interference density")
{
    CHECK(effective_interference_density(1.0, 0.0, 3.0) == 0.0);
    CHECK_THAT(effective_interference_density(2.0, 0.7, 0.0), WithinAbs(0.7, 1e-15));
    CHECK_THAT(effective_interference_density(1.0, 1.0, 1.0), WithinAbs(0.5, 1e-15));
    CHECK(effective_interference_density(0.0, 0.0, 1.0) == 0.0);
}

TEST_CASE("SINR spectral density integrates to the SINR")
{
    const ChipWaveform rrc = ChipWaveform::root_raised_cosine(0.22);
    const SystemLaw sys = make(1.0, 0.1, 2, rrc, PowerDelayLaw::uniform_delays(equal_powers(), 8, 1.0));
    const EfficiencySpectrum s = solve_efficiency_scalar(sys);
    const double sinr = s.scalar * rrc.energy() / sys.noise_density;
    double acc = 0.0;
    for (double w : s.omega) {
        acc += sinr_spectral_density(sys, 1.0, sinr, w);
    }
    acc *= (s.omega[1] - s.omega[0]) / two_pi;
    CHECK_THAT(acc, WithinRel(sinr, 1e-6));
    CHECK(sinr_spectral_density(sys, 1.0, sinr, 10.0) == 0.0);
}
