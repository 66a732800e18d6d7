#include <benchmark/benchmark.h>

#include "cfinsler/curvature.hpp"
#include "cfinsler/frame.hpp"
#include "cfinsler/metrics.hpp"

using namespace cfinsler;

static void BM_jet_multiply(benchmark::State& state) {
    const int order = static_cast<int>(state.range(0));
    JetContext ctx(order, {Complex(0.4, 0.1), Complex(0.2, -0.3)}, {Complex(1.0), Complex(0.7, 0.2)});
    auto spec = builtin("antonelli-shimada");
    WJet a = eval_L_jet(spec, ctx);
    WJet b = reciprocal(a);
    for (auto _ : state) {
        WJet p = a * b;
        benchmark::DoNotOptimize(p);
    }
}
BENCHMARK(BM_jet_multiply)->Arg(4)->Arg(5)->Arg(6);

static void BM_point_pipeline(benchmark::State& state) {
    const int order = static_cast<int>(state.range(0));
    auto spec = builtin("hartogs-randers");
    auto pts = sample_admitted(spec, 1, 42);
    for (auto _ : state) {
        auto gd = compute_geometry(spec, JetContext(order, pts[0].first, pts[0].second));
        auto fb = compute_frame(gd);
        auto cd = compute_curvature(gd, fb);
        benchmark::DoNotOptimize(cd);
    }
}
BENCHMARK(BM_point_pipeline)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
