#include "priceband/analysis.hpp"
#include "priceband/base_solver.hpp"
#include "priceband/extended_solver.hpp"

#include <benchmark/benchmark.h>

using namespace priceband;

namespace {

ModelParams problem1() { return {0.03, 0.2, 0.0, 5.0, 2.0, 0.0, 0.0}; }
ModelParams problem4() { return {0.05, 0.3, 0.5, 5.0, 1.0, 0.1, 0.5}; }

void BM_DeriveCoefficients(benchmark::State& state) {
    const ModelParams params = problem1();
    for (auto _ : state) benchmark::DoNotOptimize(derive_coefficients(params));
}
BENCHMARK(BM_DeriveCoefficients);

void BM_CostForHalfWidth(benchmark::State& state) {
    const PayoffCoefficients k = derive_coefficients(problem1());
    double y = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(cost_for_half_width(y, k));
        y = y < 2.0 ? y + 1e-6 : 0.5;
    }
}
BENCHMARK(BM_CostForHalfWidth);

void BM_SolveBase(benchmark::State& state) {
    const ModelParams params = problem1();
    for (auto _ : state) benchmark::DoNotOptimize(solve_base(params));
}
BENCHMARK(BM_SolveBase);

void BM_CostForExpCoeff(benchmark::State& state) {
    const PayoffCoefficients k = derive_coefficients(problem1());
    for (auto _ : state) benchmark::DoNotOptimize(cost_for_exp_coeff(2.973, k));
}
BENCHMARK(BM_CostForExpCoeff);

void BM_QviResidual(benchmark::State& state) {
    const BaseSolution sol = solve_base(problem1());
    const BaseValueFunction vf(sol);
    const std::vector<double> grid = default_qvi_grid(sol);
    for (auto _ : state) benchmark::DoNotOptimize(qvi_residual(vf, grid));
}
BENCHMARK(BM_QviResidual);

void BM_SolveExtendedWarm(benchmark::State& state) {
    const ExtendedSolution warm = solve_extended(problem4());
    for (auto _ : state) benchmark::DoNotOptimize(solve_extended(problem4(), warm));
}
BENCHMARK(BM_SolveExtendedWarm);

void BM_SolveExtendedCold(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(solve_extended(problem4()));
}
BENCHMARK(BM_SolveExtendedCold);

void BM_SweepCosts(benchmark::State& state) {
    const std::vector<double> descending = geometric_cost_sequence(1.0, 0.1, 1e-9);
    const std::vector<double> ascending(descending.rbegin(), descending.rend());
    for (auto _ : state) benchmark::DoNotOptimize(sweep_costs(problem1(), ascending));
}
BENCHMARK(BM_SweepCosts);

} // namespace

BENCHMARK_MAIN();
