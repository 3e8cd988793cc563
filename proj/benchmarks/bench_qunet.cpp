#include <benchmark/benchmark.h>

#include <random>

#include "drain/pinball.hpp"
#include "drain/unet.hpp"

using namespace drain::qunet;

namespace {

Tensor<float> random_input(std::size_t batch, std::size_t side)
{
    Tensor<float> x(4, batch, side, side);
    std::mt19937_64 rng(1);
    std::normal_distribution<float> n01;
    for (auto& v : x.data) v = n01(rng);
    return x;
}

void BM_UNetForward(benchmark::State& state)
{
    const UNet<float> model(ModelConfig{});
    const auto side = static_cast<std::size_t>(state.range(0));
    const auto x = random_input(1, side);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.forward(x));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side * side));
}
BENCHMARK(BM_UNetForward)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_UNetForwardBackward(benchmark::State& state)
{
    const UNet<float> model(ModelConfig{});
    const auto batch = static_cast<std::size_t>(state.range(0));
    const auto x = random_input(batch, 64);
    std::vector<float> target(batch * 64 * 64, 1.0f);
    const auto levels = quantile_levels();
    std::vector<float> grads(model.parameter_count());
    UNet<float>::Tape tape;
    for (auto _ : state) {
        const auto& out = model.forward(x, tape);
        Tensor<float> g(out.c, out.b, out.h, out.w);
        g.data = pinball_grad<float>(out.data, target, levels);
        std::fill(grads.begin(), grads.end(), 0.0f);
        model.backward(tape, g, grads);
        benchmark::DoNotOptimize(grads.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_UNetForwardBackward)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_PinballAccumulate(benchmark::State& state)
{
    const auto levels = quantile_levels();
    const std::size_t n = 64 * 64;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<float> u(0.0f, 5.0f);
    std::vector<float> pred(levels.size() * n), target(n), grad(pred.size());
    for (auto& v : pred) v = u(rng);
    for (auto& v : target) v = u(rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(pinball_accumulate<float>(pred, target, levels, 1.0 / n, grad));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pred.size()));
}
BENCHMARK(BM_PinballAccumulate)->Unit(benchmark::kMicrosecond);

}  // namespace
