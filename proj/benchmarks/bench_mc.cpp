#include "helpers.hpp"

#include <benchmark/benchmark.h>

#include <levylmm/mc.hpp>

using namespace levylmm;
using namespace testutil;

static void BM_CapletPaths(benchmark::State& state) {
    const auto mkt = paper_market(static_cast<int>(state.range(0)));
    SimConfig cfg;
    cfg.paths = 2000;
    cfg.seed = 99;
    cfg.threads = 1;
    for (auto _ : state) {
        const auto r = mc_caplet_price(mkt, 1, 0.06, cfg);
        benchmark::DoNotOptimize(r.estimate);
    }
    state.SetItemsProcessed(state.iterations() * cfg.paths);
}
BENCHMARK(BM_CapletPaths)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

static void BM_DriftAll(benchmark::State& state) {
    const auto mkt = paper_market(2);
    const auto x = mkt.initial_state();
    std::vector<double> out(5);
    for (auto _ : state) {
        mkt.drift_all(2.5, x, 1.0, out);
        benchmark::DoNotOptimize(out[0]);
    }
}
BENCHMARK(BM_DriftAll);
