#include "helpers.hpp"

#include <benchmark/benchmark.h>

#include <levylmm/expansion.hpp>
#include <levylmm/swaption.hpp>

using namespace levylmm;
using namespace testutil;

static void BM_MomentTable(benchmark::State& state) {
    for (auto _ : state) {
        const auto m = case_measure(static_cast<int>(state.range(0)));
        double acc = 0.0;
        for (int k = 2; k <= 6; ++k) acc += m.raw_moment(k);
        benchmark::DoNotOptimize(acc);
    }
}
BENCHMARK(BM_MomentTable)->DenseRange(1, 4);

static void BM_CapletOrder(benchmark::State& state) {
    const auto mkt = paper_market(2);
    const int order = static_cast<int>(state.range(0));
    for (auto _ : state) {
        const auto p = price_caplet(mkt, 1, 0.06, {order, 1.0, false});
        benchmark::DoNotOptimize(p.total());
    }
}
BENCHMARK(BM_CapletOrder)->DenseRange(0, 2);

static void BM_SwaptionOrder2(benchmark::State& state) {
    const auto mkt = paper_market(2);
    for (auto _ : state) {
        const auto p = price_swaption(mkt, 0.06);
        benchmark::DoNotOptimize(p.total());
    }
}
BENCHMARK(BM_SwaptionOrder2);

static void BM_ImpliedVol(benchmark::State& state) {
    const auto mkt = paper_market(2);
    const double da = mkt.bonds()[1] * mkt.tenor().accrual(1);
    const double price = price_caplet(mkt, 1, 0.06).total();
    for (auto _ : state)
        benchmark::DoNotOptimize(implied_black_vol(price, 0.06, 0.06, 5.0, da));
}
BENCHMARK(BM_ImpliedVol);
