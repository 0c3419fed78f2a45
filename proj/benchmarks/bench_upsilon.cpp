#include <benchmark/benchmark.h>

#include "upsr/bayes.hpp"
#include "upsr/frequentist.hpp"
#include "upsr/random.hpp"
#include "upsr/upsilon.hpp"

namespace {

const upsr::UpsilonParams kTwo({-0.993, -2.175}, {84.0, 964.0});

void BM_Cumulants(benchmark::State& state) {
    const int order = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(upsr::upsilon_cumulants(kTwo, order));
    }
}
BENCHMARK(BM_Cumulants)->Arg(8)->Arg(18);

void BM_ApproxConstruction(benchmark::State& state) {
    for (auto _ : state) {
        upsr::UpsilonApprox law(kTwo);
        benchmark::DoNotOptimize(law.mean());
    }
}
BENCHMARK(BM_ApproxConstruction);

void BM_EdgeworthCdf(benchmark::State& state) {
    const upsr::UpsilonApprox law(kTwo, upsr::ApproxOrder{static_cast<int>(state.range(0)), 6});
    double x = -4.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(law.cdf(x));
        x = x > -1.0 ? -4.0 : x + 0.01;
    }
}
BENCHMARK(BM_EdgeworthCdf)->Arg(4)->Arg(8)->Arg(16);

void BM_CornishFisherQuantile(benchmark::State& state) {
    const upsr::UpsilonApprox law(kTwo);
    for (auto _ : state) {
        benchmark::DoNotOptimize(law.cf_quantile(0.005));
    }
}
BENCHMARK(BM_CornishFisherQuantile);

void BM_RefinedQuantile(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(upsr::quantile_refined(kTwo, 0.005));
    }
}
BENCHMARK(BM_RefinedQuantile);

void BM_Sample(benchmark::State& state) {
    upsr::RngStream rng(1);
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(upsr::sample_upsilon(kTwo, rng, n));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_Sample)->Arg(1 << 16);

void BM_PredictionInterval(benchmark::State& state) {
    const upsr::SRSummary s{0.2, 128};
    for (auto _ : state) {
        benchmark::DoNotOptimize(upsr::sr_prediction_interval(s, 128));
    }
}
BENCHMARK(BM_PredictionInterval);

void BM_CredibleInterval(benchmark::State& state) {
    const upsr::NIGHyper h{0.01, 64.0, 0.0025, 64.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(upsr::credible_interval(h));
    }
}
BENCHMARK(BM_CredibleInterval);

} // namespace

BENCHMARK_MAIN();
