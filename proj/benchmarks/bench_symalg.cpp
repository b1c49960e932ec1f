#include <benchmark/benchmark.h>

#include "optokerr/symalg.hpp"

using namespace okerr::sym;

static void BM_SecondOrderAverage(benchmark::State& state) {
    const SymbolicPolynomial H = interaction_hamiltonian();
    for (auto _ : state) {
        benchmark::DoNotOptimize(bogoliubov_effective(H, 2));
    }
}
BENCHMARK(BM_SecondOrderAverage)->Unit(benchmark::kMillisecond);

static void BM_DisplacementPower(benchmark::State& state) {
    const SymbolicPolynomial x = mode_b_dag(1) + mode_b(-1);
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(power(x, n));
    }
}
BENCHMARK(BM_DisplacementPower)->Arg(4)->Arg(8)->Arg(12);

static void BM_NumericCommutator(benchmark::State& state) {
    const NumericPolynomial H = evaluate(interaction_hamiltonian(), {0.02, 0.02, 0.01, 1.0});
    for (auto _ : state) {
        benchmark::DoNotOptimize(commutator(H, H.adjoint()));
    }
}
BENCHMARK(BM_NumericCommutator);
