#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace drain::qunet {

struct AdamConfig {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

template <typename T>
struct AdamState {
    std::vector<T> m;
    std::vector<T> v;
    std::uint64_t step = 0;

    explicit AdamState(std::size_t n = 0) : m(n, T(0)), v(n, T(0)) {}
};

/// One bias-corrected Adam update; increments state.step first.
template <typename T>
void adam_step(std::span<T> params, std::span<const T> grads, AdamState<T>& state, const AdamConfig& cfg);

}  // namespace drain::qunet
