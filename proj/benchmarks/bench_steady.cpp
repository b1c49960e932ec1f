#include <benchmark/benchmark.h>

#include "optokerr/steady.hpp"

using namespace okerr;
using namespace okerr::steady;

static void BM_SolveOccupation(benchmark::State& state) {
    double drive = 0.0;
    for (auto _ : state) {
        drive = drive > 200.0 ? 0.0 : drive + 0.37;
        benchmark::DoNotOptimize(solve_occupation(0.5, 3.0, 0.01, drive));
    }
}
BENCHMARK(BM_SolveOccupation);

static void BM_CoupledFixedPoints(benchmark::State& state) {
    EffectiveParams ep;
    ep.chi_a = 0.02;
    ep.chi_b = 0.03;
    ep.chi_ab = -0.015;
    ep.omega_c_tilde = 1.0;
    ep.Omega_tilde = 2.5;
    const MeanFieldDrive d{1.0, 1.0, 0.8, 6.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(coupled_fixed_points(ep, d));
    }
}
BENCHMARK(BM_CoupledFixedPoints)->Unit(benchmark::kMicrosecond);

static void BM_PinnedSweep(benchmark::State& state) {
    SweepSetup s;
    s.ep.chi_b = 0.01;
    s.ep.Omega_tilde = 3.01;
    s.drive = {1.0, 1.0, 0.0, 0.0};
    s.pinned_n_a = 0.0;
    const auto grid = linear_grid(0.0, 20.0, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(hysteresis_sweep(s, grid, Direction::up));
    }
}
BENCHMARK(BM_PinnedSweep)->Arg(1501)->Unit(benchmark::kMillisecond);
