#include <benchmark/benchmark.h>

#include <dpp/beta.hpp>
#include <dpp/borrowing.hpp>
#include <dpp/engine.hpp>

namespace {

using namespace dpp;

void BM_ProbSuperiority(benchmark::State& state) {
    const BetaParams t(20.001, 25.001), c(31.75, 53.0);
    for (auto _ : state) benchmark::DoNotOptimize(prob_superiority(t, c));
}
BENCHMARK(BM_ProbSuperiority);

// Shapes near zero exercise the graded nodes and the log-space quantiles.
void BM_ProbSuperiorityEdge(benchmark::State& state) {
    const BetaParams t(1.001, 44.001), c(0.001, 45.001);
    for (auto _ : state) benchmark::DoNotOptimize(prob_superiority(t, c));
}
BENCHMARK(BM_ProbSuperiorityEdge);

void BM_WeightEb(benchmark::State& state) {
    const HistoricalControl h(172, 637, 31);
    const BetaParams prior(0.001, 0.001);
    int y = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(weight_eb(y, 31, h, prior));
        y = (y + 1) % 32;
    }
}
BENCHMARK(BM_WeightEb);

void BM_WeightJsd(benchmark::State& state) {
    const HistoricalControl h(54, 180, 45);
    const BetaParams prior(0.001, 0.001);
    for (auto _ : state) benchmark::DoNotOptimize(weight_jsd(12, 45, h, prior, 2.0, 0.25));
}
BENCHMARK(BM_WeightJsd);

DesignSpec design(int n) {
    const HistoricalControl h(54, 180, 45);
    return {n, n, {0.001, 0.001}, {0.001, 0.001}, h, BorrowingPolicy::for_history(EmpiricalBayes{}, 0.1, h), 0.1};
}

void BM_OutcomeGrid(benchmark::State& state) {
    const DesignSpec d = design(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        const OutcomeGrid g(d, {1});
        benchmark::DoNotOptimize(g.post_probs().data());
    }
}
BENCHMARK(BM_OutcomeGrid)->Arg(30)->Arg(45)->Arg(90)->Unit(benchmark::kMillisecond);

void BM_ExactOc(benchmark::State& state) {
    const OutcomeGrid g(design(45), {1});
    const double tau = calibrate_tau(g, 0.3, ExactEnumeration{});
    for (auto _ : state)
        benchmark::DoNotOptimize(
            operating_characteristics(g, {0.4, 0.6, 0.3}, tau, ExactEnumeration{}, 0.01, {1}));
}
BENCHMARK(BM_ExactOc)->Unit(benchmark::kMicrosecond);

void BM_MonteCarloOc(benchmark::State& state) {
    const OutcomeGrid g(design(45), {1});
    const MonteCarlo mc{static_cast<std::uint64_t>(state.range(0)), 1};
    for (auto _ : state)
        benchmark::DoNotOptimize(operating_characteristics(g, {0.4, 0.6, 0.3}, 0.9, mc, 0.01, {1}));
}
BENCHMARK(BM_MonteCarloOc)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
