#include <benchmark/benchmark.h>

#include <random>

#include "drain/colocation.hpp"
#include "drain/quantiles.hpp"
#include "drain/synth.hpp"

using namespace drain;

namespace {

Geolocation grid(std::size_t n, double lat0, double lon0, double step)
{
    std::vector<float> lat(n * n), lon(n * n);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t p = 0; p < n; ++p) {
            lat[s * n + p] = static_cast<float>(lat0 + step * static_cast<double>(s));
            lon[s * n + p] = static_cast<float>(lon0 + step * static_cast<double>(p));
        }
    }
    return Geolocation(n, n, std::move(lat), std::move(lon), std::vector<double>(n, 0.0));
}

void BM_ColocateRadiusMean(benchmark::State& state)
{
    const auto n_samples = static_cast<std::size_t>(state.range(0));
    const auto targets = grid(64, 45.0, 2.0, 0.045);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> lat(44.9, 48.0), lon(1.9, 5.0), v(0.0, 10.0);
    std::vector<colocation::PointSample> samples(n_samples);
    for (auto& s : samples) s = {lat(rng), lon(rng), v(rng), 0.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(colocation::colocate_radius_mean(samples, targets, 5.0));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(targets.size()));
}
BENCHMARK(BM_ColocateRadiusMean)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

QuantileField random_quantiles(std::size_t n)
{
    std::mt19937_64 rng(4);
    std::normal_distribution<float> n01;
    const auto geo = grid(n, 0.0, 0.0, 0.05);
    std::vector<float> values(kQuantileLevels * geo.size());
    for (auto& x : values) x = std::exp(n01(rng));
    return QuantileField(geo, std::move(values));
}

void BM_Monotonize(benchmark::State& state)
{
    const auto qf = random_quantiles(64);
    for (auto _ : state) {
        benchmark::DoNotOptimize(quantiles::monotonize(qf));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(qf.n_pixels()));
}
BENCHMARK(BM_Monotonize)->Unit(benchmark::kMillisecond);

void BM_PdfFromCdf(benchmark::State& state)
{
    const auto qf = quantiles::monotonize(random_quantiles(64));
    std::vector<double> edges;
    for (int k = 0; k <= 40; ++k) edges.push_back(0.25 * k);
    for (auto _ : state) {
        benchmark::DoNotOptimize(quantiles::pdf_from_cdf(qf, edges));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(qf.n_pixels()));
}
BENCHMARK(BM_PdfFromCdf)->Unit(benchmark::kMillisecond);

void BM_SynthScene(benchmark::State& state)
{
    const dataset::SynthConfig cfg;
    const auto mask = dataset::synth_surface_mask(1.0, cfg.seed);
    std::uint64_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dataset::synth_scene(cfg, mask, i++));
    }
}
BENCHMARK(BM_SynthScene)->Unit(benchmark::kMillisecond);

}  // namespace
