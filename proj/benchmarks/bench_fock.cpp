#include <benchmark/benchmark.h>

#include <numbers>

#include "optokerr/fock.hpp"

using namespace okerr;
using namespace okerr::fock;

static void BM_ApplyExponential(benchmark::State& state) {
    const int db = static_cast<int>(state.range(0));
    const FockSpace sp(6, db);
    const InteractionHamiltonian H({1.0, 0.02, 0.02, 0.01}, sp);
    const Matrix h = H.at(0.3);
    const Vector psi = product_state(fock_amplitudes(6, 1), coherent_amplitudes(db, 1.0)).normalized();
    for (auto _ : state) {
        benchmark::DoNotOptimize(apply_exponential(h, 2.0 * std::numbers::pi / 40.0, psi));
    }
}
BENCHMARK(BM_ApplyExponential)->Arg(16)->Arg(32);

static void BM_MasterRhs(benchmark::State& state) {
    const int db = static_cast<int>(state.range(0));
    const FockSpace sp(2, db);
    EffectiveParams ep;
    ep.chi_b = 0.01;
    ep.Omega_tilde = 0.5;
    DriveParams d;
    d.mech_amp = 0.3;
    const MasterEquation eq(build_effective_hamiltonian(ep, d, sp), {1.0, 0.1, 0.5}, sp);
    const Matrix rho = thermal_state(sp.dim(), 0.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(eq.rhs(rho));
    }
}
BENCHMARK(BM_MasterRhs)->Arg(20)->Arg(40);

static void BM_InteractionPeriod(benchmark::State& state) {
    const FockSpace sp(6, 16);
    const InteractionHamiltonian H({1.0, 0.02, 0.02, 0.01}, sp);
    const Vector psi = product_state(fock_amplitudes(6, 1), coherent_amplitudes(16, 1.0)).normalized();
    for (auto _ : state) {
        benchmark::DoNotOptimize(propagate_interaction(H, psi, 2.0 * std::numbers::pi, 2.0 * std::numbers::pi / 40.0));
    }
}
BENCHMARK(BM_InteractionPeriod)->Unit(benchmark::kMillisecond);
