#include "drain/adam.hpp"

#include <cmath>

#include "drain/errors.hpp"

namespace drain::qunet {

template <typename T>
void adam_step(std::span<T> params, std::span<const T> grads, AdamState<T>& state, const AdamConfig& cfg)
{
    if (params.size() != grads.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
        throw UsageError("adam_step: parameter, gradient and state sizes differ");
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    const T b1 = static_cast<T>(cfg.beta1);
    const T b2 = static_cast<T>(cfg.beta2);
    const T one_b1 = static_cast<T>(1.0 - cfg.beta1);
    const T one_b2 = static_cast<T>(1.0 - cfg.beta2);
    const T inv_bc1 = static_cast<T>(1.0 / bc1);
    const T inv_bc2 = static_cast<T>(1.0 / bc2);
    const T lr = static_cast<T>(cfg.learning_rate);
    const T eps = static_cast<T>(cfg.epsilon);

    T* p = params.data();
    const T* g = grads.data();
    T* m = state.m.data();
    T* v = state.v.data();
    for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = b1 * m[i] + one_b1 * g[i];
        v[i] = b2 * v[i] + one_b2 * g[i] * g[i];
        const T m_hat = m[i] * inv_bc1;
        const T v_hat = v[i] * inv_bc2;
        p[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
}

template void adam_step<float>(std::span<float>, std::span<const float>, AdamState<float>&, const AdamConfig&);
template void adam_step<double>(std::span<double>, std::span<const double>, AdamState<double>&, const AdamConfig&);

}  // namespace drain::qunet
