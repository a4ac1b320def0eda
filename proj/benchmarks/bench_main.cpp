#include <benchmark/benchmark.h>

#include "acdma/capacity.hpp"
#include "acdma/montecarlo.hpp"

using namespace acdma;

namespace {

SystemLaw rrc_system(std::size_t delay_atoms)
{
    return SystemLaw{1.0, 0.1, 2, ChipWaveform::root_raised_cosine(0.22),
                     PowerDelayLaw::uniform_delays(equal_powers(), delay_atoms, 1.0)};
}

} // namespace

static void BM_SolveUpsilon(benchmark::State& state)
{
    const SystemLaw sys = rrc_system(64);
    const FrequencyGrid grid(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_upsilon(sys, grid));
    }
}
BENCHMARK(BM_SolveUpsilon)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_ScalarEfficiency(benchmark::State& state)
{
    const SystemLaw sys = rrc_system(64);
    ScalarSolveOptions opts;
    opts.grid_points = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_efficiency_scalar(sys, opts).scalar);
    }
}
BENCHMARK(BM_ScalarEfficiency)->Arg(512)->Arg(4096)->Unit(benchmark::kMicrosecond);

static void BM_CapacityConstrained(benchmark::State& state)
{
    const SystemLaw sys = rrc_system(64);
    for (auto _ : state) {
        benchmark::DoNotOptimize(capacity_constrained(sys));
    }
}
BENCHMARK(BM_CapacityConstrained)->Unit(benchmark::kMillisecond);

static void BM_PhiMatrix(benchmark::State& state)
{
    const ChipWaveform w = ChipWaveform::root_raised_cosine(0.22);
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_phi_matrix(w, n, 2, 0.3, MatrixKind::BlockCirculant));
    }
}
BENCHMARK(BM_PhiMatrix)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

static void BM_MonteCarloTrial(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const FiniteSystemConfig cfg = config_from_law(PowerDelayLaw::uniform_delays(equal_powers(), 64, 1.0), n, n / 2,
                                                   2, ChipWaveform::root_raised_cosine(0.22), 0.1);
    const FiniteModel model(cfg);
    std::uint64_t seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mmse_sinr_all(model.draw(seed++)));
    }
}
BENCHMARK(BM_MonteCarloTrial)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
