#include "drain/pinball.hpp"

#include <cmath>

#include "drain/errors.hpp"

namespace drain::qunet {

std::vector<double> quantile_levels(std::size_t n)
{
    std::vector<double> q(n);
    for (std::size_t j = 0; j < n; ++j) {
        q[j] = static_cast<double>(j + 1) / static_cast<double>(n + 1);
    }
    return q;
}

std::size_t valid_target_count(std::span<const float> target) noexcept
{
    std::size_t n = 0;
    for (float y : target) {
        n += std::isnan(y) ? 0 : 1;
    }
    return n;
}

namespace {

template <typename T>
void check_shapes(std::span<const T> pred, std::span<const float> target, std::span<const double> levels)
{
    if (pred.size() != target.size() * levels.size()) {
        throw UsageError("pinball: prediction size is not n_levels x n_pixels");
    }
}

}  // namespace

template <typename T>
double pinball_accumulate(std::span<const T> pred, std::span<const float> target, std::span<const double> levels,
                          double inv_n, std::span<T> grad)
{
    check_shapes(pred, target, levels);
    const std::size_t n = target.size();
    double total = 0.0;
    for (std::size_t j = 0; j < levels.size(); ++j) {
        const double q = levels[j];
        const T g_under = static_cast<T>(-q * inv_n);        // y - yhat >= 0
        const T g_over = static_cast<T>((1.0 - q) * inv_n);  // y - yhat < 0
        const T* p = pred.data() + j * n;
        T* g = grad.empty() ? nullptr : grad.data() + j * n;
        double level_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const float y = target[i];
            if (std::isnan(y)) {
                if (g) {
                    g[i] = T(0);
                }
                continue;
            }
            const double u = static_cast<double>(y) - static_cast<double>(p[i]);
            if (u >= 0.0) {
                level_sum += q * u;
                if (g) {
                    g[i] = g_under;
                }
            } else {
                level_sum += (q - 1.0) * u;
                if (g) {
                    g[i] = g_over;
                }
            }
        }
        total += level_sum;
    }
    return total;
}

template <typename T>
double pinball_loss(std::span<const T> pred, std::span<const float> target, std::span<const double> levels)
{
    check_shapes(pred, target, levels);
    const auto n = valid_target_count(target);
    if (n == 0) {
        throw DataError("pinball loss over zero valid pixels");
    }
    return pinball_accumulate<T>(pred, target, levels, 1.0, {}) / static_cast<double>(n);
}

template <typename T>
std::vector<T> pinball_grad(std::span<const T> pred, std::span<const float> target, std::span<const double> levels)
{
    check_shapes(pred, target, levels);
    const auto n = valid_target_count(target);
    if (n == 0) {
        throw DataError("pinball gradient over zero valid pixels");
    }
    std::vector<T> grad(pred.size());
    pinball_accumulate<T>(pred, target, levels, 1.0 / static_cast<double>(n), grad);
    return grad;
}

template double pinball_loss<float>(std::span<const float>, std::span<const float>, std::span<const double>);
template double pinball_loss<double>(std::span<const double>, std::span<const float>, std::span<const double>);
template std::vector<float> pinball_grad<float>(std::span<const float>, std::span<const float>,
                                                std::span<const double>);
template std::vector<double> pinball_grad<double>(std::span<const double>, std::span<const float>,
                                                  std::span<const double>);
template double pinball_accumulate<float>(std::span<const float>, std::span<const float>, std::span<const double>,
                                          double, std::span<float>);
template double pinball_accumulate<double>(std::span<const double>, std::span<const float>, std::span<const double>,
                                           double, std::span<double>);

}  // namespace drain::qunet
