#include <benchmark/benchmark.h>

#include <array>
#include <vector>

#include "replidyn/elliptic.hpp"
#include "replidyn/initdata.hpp"
#include "replidyn/replicator.hpp"
#include "replidyn/solver.hpp"

using namespace replidyn;

namespace {

GridPtr interval(int n) {
    const std::array<double, 1> e{1.0};
    const std::array<int, 1> m{n};
    return build_grid(1, e, m);
}

GridPtr square(int n) {
    const std::array<double, 2> e{1.0, 1.0};
    const std::array<int, 2> m{n, n};
    return build_grid(2, e, m);
}

Field supercritical(const TorsionSolution& t, double eps) {
    Field u = t.phi;
    for (auto& v : u.values) v = 18.0 * v + eps;  // corrected mass 1.5 on the unit interval
    return u;
}

}  // namespace

static void BM_Torsion1D(benchmark::State& state) {
    const GridPtr g = interval(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(solve_torsion(g));
}
BENCHMARK(BM_Torsion1D)->Arg(201)->Arg(801)->Arg(3201);

static void BM_Torsion2D(benchmark::State& state) {
    const GridPtr g = square(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(solve_torsion(g));
}
BENCHMARK(BM_Torsion2D)->Arg(33)->Arg(65)->Unit(benchmark::kMillisecond);

static void BM_DirichletEnergy(benchmark::State& state) {
    const GridPtr g = square(static_cast<int>(state.range(0)));
    const Field f = sample(g, [](double x, double y) { return x * (1 - x) * y * (1 - y); });
    for (auto _ : state) benchmark::DoNotOptimize(dirichlet_energy(f, 0.0));
}
BENCHMARK(BM_DirichletEnergy)->Arg(65)->Arg(257);

static void BM_SemiImplicitStep1D(benchmark::State& state) {
    const GridPtr g = interval(static_cast<int>(state.range(0)));
    const TorsionSolution t = solve_torsion(g);
    SolverParams p;
    p.dt_init = p.dt_max = 1e-5;
    p.t_end = 1e9;
    const SolverState s0 = initial_state(supercritical(t, p.epsilon), p);
    for (auto _ : state) benchmark::DoNotOptimize(step(s0, p));
}
BENCHMARK(BM_SemiImplicitStep1D)->Arg(201)->Arg(801);

static void BM_SemiImplicitStep2D(benchmark::State& state) {
    const GridPtr g = square(static_cast<int>(state.range(0)));
    const TorsionSolution t = solve_torsion(g);
    SolverParams p;
    p.dt_init = p.dt_max = 1e-5;
    p.t_end = 1e9;
    Field u = t.phi;
    for (auto& v : u.values) v = 20.0 * v + p.epsilon;
    const SolverState s0 = initial_state(u, p);
    for (auto _ : state) benchmark::DoNotOptimize(step(s0, p));
}
BENCHMARK(BM_SemiImplicitStep2D)->Arg(33)->Arg(65)->Unit(benchmark::kMillisecond);

static void BM_BlowupRun1D(benchmark::State& state) {
    const GridPtr g = interval(201);
    const TorsionSolution t = solve_torsion(g);
    SolverParams p;
    p.dt_max = 2e-5;
    p.t_end = 50.0;
    const Field u0 = supercritical(t, p.epsilon);
    for (auto _ : state) benchmark::DoNotOptimize(run(u0, p, t));
}
BENCHMARK(BM_BlowupRun1D)->Unit(benchmark::kMillisecond);

static void BM_Mollify(benchmark::State& state) {
    const GridPtr g = interval(801);
    const TorsionSolution t = solve_torsion(g);
    for (auto _ : state) benchmark::DoNotOptimize(mollify(t.phi, 0.01));
}
BENCHMARK(BM_Mollify);

static void BM_ReplicatorRhs(benchmark::State& state) {
    const std::size_t m = static_cast<std::size_t>(state.range(0));
    const PayoffMatrix a = payoff_matrix_from_kernel(*interval(static_cast<int>(m)), 0.05);
    const std::vector<double> p(m, 1.0 / static_cast<double>(m));
    for (auto _ : state) benchmark::DoNotOptimize(replicator_rhs(p, a));
}
BENCHMARK(BM_ReplicatorRhs)->Arg(64)->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
