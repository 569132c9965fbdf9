#include <texstat/filterbank.hpp>
#include <texstat/metric.hpp>
#include <texstat/statistics.hpp>
#include <texstat/texenv.hpp>

#include <benchmark/benchmark.h>

#include <complex>
#include <random>

namespace {

using namespace texstat;

Signal noise(std::size_t n, std::uint64_t seed) {
    auto x = gaussian_noise(n, seed);
    for (auto& v : x) v *= 0.1;
    return {std::move(x), 44100.0};
}

void BM_CochlearFilterbank(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto fb = make_filterbank(FilterbankSpec::cochlear_default(), n);
    const auto x = noise(n, 1);
    for (auto _ : state) benchmark::DoNotOptimize(apply_filterbank(fb, x));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_CochlearFilterbank)->Arg(16384)->Arg(65536)->Unit(benchmark::kMillisecond);

void BM_SummaryStatistics(benchmark::State& state) {
    StatsConfig cfg;
    cfg.frame_length = static_cast<std::size_t>(state.range(0));
    const StatsAnalyzer analyzer(cfg);
    const auto x = noise(cfg.frame_length, 2);
    for (auto _ : state) benchmark::DoNotOptimize(analyzer(x));
}
BENCHMARK(BM_SummaryStatistics)->Arg(16384)->Arg(65536)->Unit(benchmark::kMillisecond);

void BM_MultiScaleSpectrogram(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto x = noise(n, 3);
    const auto y = noise(n, 4);
    for (auto _ : state) benchmark::DoNotOptimize(mss_loss(x.view(), y.view()));
}
BENCHMARK(BM_MultiScaleSpectrogram)->Arg(65536)->Unit(benchmark::kMillisecond);

void BM_EnvelopeFromParams(benchmark::State& state) {
    const auto k = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 gen(5);
    std::normal_distribution<double> g;
    std::vector<std::complex<double>> p(k);
    for (auto& v : p) v = {g(gen), g(gen)};
    p[0] = p[0].real();
    for (auto _ : state) benchmark::DoNotOptimize(envelope_from_params(p, 65536));
}
BENCHMARK(BM_EnvelopeFromParams)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_GenerateSeed(benchmark::State& state) {
    auto spec = FilterbankSpec::cochlear_default();
    spec.n_filters = static_cast<std::size_t>(state.range(0));
    const auto fb = make_filterbank(spec, 65536);
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(generate_seed(fb, 65536, seed++));
}
BENCHMARK(BM_GenerateSeed)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
