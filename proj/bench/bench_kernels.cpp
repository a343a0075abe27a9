// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include "qlink/delivery.hpp"
#include "qlink/mc_sim.hpp"
#include "qlink/planner.hpp"

namespace {

qlink::LinkConfig example3() {
    qlink::LinkConfig c;
    c.transducer = qlink::transducer_preset("transducer2");
    c.qubit = qlink::qubit_preset("qubit1");
    c.protocol.p_mo_override = 0.02;
    c.policy.t_del_us = 15.0;
    c.policy.n_parallel = 20;
    return c;
}

void BM_TrialsParallel(benchmark::State& state) {
    const auto m = qlink::delivery_model(example3());
    for (auto _ : state) benchmark::DoNotOptimize(qlink::run_trials(m, 15, state.range(0), 1));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TrialsSerial(benchmark::State& state) {
    const auto m = qlink::delivery_model(example3());
    for (auto _ : state)
        benchmark::DoNotOptimize(qlink::run_trials_reference(m, 15, state.range(0), 1));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_CurveParallel(benchmark::State& state) {
    const auto m = qlink::delivery_model(example3());
    for (auto _ : state) benchmark::DoNotOptimize(qlink::delivery_curve(m, state.range(0)));
}

void BM_CurveSerial(benchmark::State& state) {
    const auto m = qlink::delivery_model(example3());
    for (auto _ : state) benchmark::DoNotOptimize(qlink::delivery_curve_serial(m, state.range(0)));
}

void BM_TradeoffParallel(benchmark::State& state) {
    const auto c = example3();
    for (auto _ : state) benchmark::DoNotOptimize(qlink::tradeoff_grid(state.range(0), c));
}

void BM_TradeoffSerial(benchmark::State& state) {
    const auto c = example3();
    for (auto _ : state) benchmark::DoNotOptimize(qlink::tradeoff_grid_serial(state.range(0), c));
}

}  // namespace

BENCHMARK(BM_TrialsParallel)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrialsSerial)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CurveParallel)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CurveSerial)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TradeoffParallel)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TradeoffSerial)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
