// Serial reference vs OpenMP variants of the embarrassingly parallel kernels.
#include "zeroblock/analytics.hpp"
#include "zeroblock/batch.hpp"
#include "zeroblock/churn.hpp"

#include <benchmark/benchmark.h>

using namespace zeroblock;

namespace {

SimConfig small_config()
{
    SimConfig c;
    c.miners = {{0, Role::Selfish, 0.3}, {1, Role::Honest, 0.35}, {2, Role::Honest, 0.35}};
    c.zeroblock = true;
    c.duration_blocks = 2000;
    c.record_trace = false;
    return c;
}

double share_of_first(const SimConfig& cfg, std::size_t)
{
    return revenue_shares(run(cfg), cfg.ipt).miners.front().share;
}

void BM_batch_serial(benchmark::State& state)
{
    const auto cfg = small_config();
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_batch_serial(cfg, static_cast<std::size_t>(state.range(0)), share_of_first));
    }
}

void BM_batch_parallel(benchmark::State& state)
{
    const auto cfg = small_config();
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_batch(cfg, static_cast<std::size_t>(state.range(0)), share_of_first));
    }
}

void BM_join_mc_serial(benchmark::State& state)
{
    const ChurnParams p{5000, 8, 3250, 1750};
    for (auto _ : state) benchmark::DoNotOptimize(estimate_join_success_serial(p, state.range(0), 7));
}

void BM_join_mc_parallel(benchmark::State& state)
{
    const ChurnParams p{5000, 8, 3250, 1750};
    for (auto _ : state) benchmark::DoNotOptimize(estimate_join_success(p, state.range(0), 7));
}

void BM_event4_serial(benchmark::State& state)
{
    for (auto _ : state) benchmark::DoNotOptimize(event4_monte_carlo_serial(0.49, state.range(0), 3));
}

void BM_event4_parallel(benchmark::State& state)
{
    for (auto _ : state) benchmark::DoNotOptimize(event4_monte_carlo(0.49, state.range(0), 3));
}

} // namespace

BENCHMARK(BM_batch_serial)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_batch_parallel)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_join_mc_serial)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_join_mc_parallel)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_event4_serial)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_event4_parallel)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
