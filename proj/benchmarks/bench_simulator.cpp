#include "priceband/base_solver.hpp"
#include "priceband/rng.hpp"
#include "priceband/simulator.hpp"

#include <benchmark/benchmark.h>

using namespace priceband;

namespace {

ModelParams problem1() { return {0.03, 0.2, 0.0, 5.0, 2.0, 0.0, 0.0}; }

void BM_NormalDraw(benchmark::State& state) {
    NormalSampler normal(path_stream(1, 0));
    for (auto _ : state) benchmark::DoNotOptimize(normal());
}
BENCHMARK(BM_NormalDraw);

void BM_SimulatePath(benchmark::State& state) {
    const Model model(problem1());
    const BaseSolution sol = solve_base(problem1());
    SimulationConfig cfg;
    cfg.n_paths = 1;
    cfg.dt = 1e-3;
    cfg.horizon = static_cast<double>(state.range(0));
    cfg.seed = 42;
    cfg.initial_x = sol.x_star;
    cfg.policy = optimal_policy(sol);
    std::uint64_t path = 0;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_path(model, cfg, path++));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(cfg.horizon / cfg.dt));
}
BENCHMARK(BM_SimulatePath)->Arg(10)->Arg(100);

void BM_SimulateSerial(benchmark::State& state) {
    const Model model(problem1());
    const BaseSolution sol = solve_base(problem1());
    SimulationConfig cfg;
    cfg.n_paths = state.range(0);
    cfg.dt = 2e-3;
    cfg.horizon = 50.0;
    cfg.seed = 42;
    cfg.initial_x = sol.x_star;
    cfg.policy = optimal_policy(sol);
    cfg.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(simulate(model, cfg));
}
BENCHMARK(BM_SimulateSerial)->Arg(64)->Arg(256);

void BM_SimulateParallel(benchmark::State& state) {
    const Model model(problem1());
    const BaseSolution sol = solve_base(problem1());
    SimulationConfig cfg;
    cfg.n_paths = 256;
    cfg.dt = 2e-3;
    cfg.horizon = 50.0;
    cfg.seed = 42;
    cfg.initial_x = sol.x_star;
    cfg.policy = optimal_policy(sol);
    cfg.threads = 0;
    for (auto _ : state) benchmark::DoNotOptimize(simulate(model, cfg));
}
BENCHMARK(BM_SimulateParallel);

void BM_FirstExitStats(benchmark::State& state) {
    const Model model(problem1());
    const BaseSolution sol = solve_base(problem1());
    SimulationConfig cfg;
    cfg.n_paths = 64;
    cfg.dt = 2e-3;
    cfg.horizon = 200.0;
    cfg.seed = 42;
    cfg.initial_x = sol.x_star;
    cfg.policy = optimal_policy(sol);
    for (auto _ : state) benchmark::DoNotOptimize(first_exit_time_stats(model, cfg));
}
BENCHMARK(BM_FirstExitStats);

} // namespace

BENCHMARK_MAIN();
