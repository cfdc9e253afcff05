#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "msstab/msstab.hpp"

namespace {

using namespace msstab;

StripDomain example_strip() { return StripDomain{1.0, 1.0, BoundaryTrace{1.0, 1.0, {}}, BoundaryTrace{-1.0, 0.0, {}}}; }

std::vector<double> cosine(std::size_t n) {
    std::vector<double> phi(n);
    for (std::size_t i = 0; i < n; ++i) phi[i] = std::cos(2 * std::numbers::pi * static_cast<double>(i) / n);
    return phi;
}

void BM_StateSolve(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const GraphCurve c = GraphCurve::flat(1.0, n);
    const StripDomain d = example_strip();
    for (auto _ : state) {
        auto result = solve_state(d, c, Grid{n, n});
        benchmark::DoNotOptimize(result.first.values(Side::plus).data());
    }
}
BENCHMARK(BM_StateSolve)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_OperatorApply(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const GraphCurve c = GraphCurve::flat(1.0, n);
    const StripDomain d = example_strip();
    const Grid grid{n, n};
    auto [u, s] = solve_state(d, c, grid);
    const TOperator op(d, c, std::move(u), grid, assemble_tilde_gram(c, Restriction::mean_zero));
    const auto phi = cosine(n);
    for (auto _ : state) {
        auto t = op.apply(phi);
        benchmark::DoNotOptimize(t.data());
    }
}
BENCHMARK(BM_OperatorApply)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Lambda1(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const GraphCurve c = GraphCurve::flat(1.0, n);
    const StripDomain d = example_strip();
    const Grid grid{n, n};
    auto [u, s] = solve_state(d, c, grid);
    const TOperator op(d, c, std::move(u), grid, assemble_tilde_gram(c, Restriction::mean_zero));
    for (auto _ : state) benchmark::DoNotOptimize(lambda1(op).value);
}
BENCHMARK(BM_Lambda1)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_GramAssembly(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const GraphCurve c = GraphCurve::sample(1.0, n, [](double x) { return 0.05 * std::sin(2 * std::numbers::pi * x); });
    for (auto _ : state) {
        auto g = assemble_tilde_gram(c, Restriction::mean_zero);
        benchmark::DoNotOptimize(g.min_eigenvalue());
    }
}
BENCHMARK(BM_GramAssembly)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
