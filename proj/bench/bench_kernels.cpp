#include <benchmark/benchmark.h>
#include "dlkit/cutoff.hpp"
#include "dlkit/equilibrium.hpp"
#include "dlkit/simulate.hpp"
#include "dlkit/transport.hpp"

using namespace dlkit;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::parallel : Exec::serial; }

void BM_SdeEnsemble(benchmark::State& state) {
    ModelParams p = ModelParams::make(4, 4.0, 1.0);
    ParticleState x0({1, 2, 3, 4});
    RngStream rng(7, 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(ensemble_sqrt_phi(x0, {0.5}, p, 200, rng, 1e-3, exec_of(state)));
}
BENCHMARK(BM_SdeEnsemble)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MatrixPhi(benchmark::State& state) {
    MatrixParams mp = MatrixParams::bru(64, 64);
    MatrixState M0 = MatrixState::Zero(64, 64);
    RngStream rng(7, 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(ensemble_matrix_phi(M0, {1.0, 2.0, 4.0}, mp, 200, rng, exec_of(state)));
}
BENCHMARK(BM_MatrixPhi)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_AssignmentW2(benchmark::State& state) {
    ModelParams p = ModelParams::make(4, 4.0, 1.0);
    RngStream rng(3, 0);
    std::vector<ParticleState> a, b;
    for (auto& g : sample_equilibrium_many(p, 300, rng.child(0))) a.push_back(g.state);
    for (auto& g : sample_equilibrium_many(p, 300, rng.child(1))) b.push_back(g.state);
    OtOptions o;
    o.exec = exec_of(state);
    for (auto _ : state)
        benchmark::DoNotOptimize(wasserstein_intrinsic(EmpiricalMeasure::uniform(a), EmpiricalMeasure::uniform(b), 2, o));
}
BENCHMARK(BM_AssignmentW2)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}

BENCHMARK_MAIN();
