#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace drain::qunet {

/// Quantile levels q_j = j / (n + 1), j = 1..n (j/100 for the usual 99).
std::vector<double> quantile_levels(std::size_t n = 99);

// Predictions are laid out plane-major: pred[j * n_pixels + i] is the
// estimate of level j at pixel i. NaN targets are excluded from N.

/// L = sum_j (1/N) sum_i rho_{q_j}(y_i - yhat_ij) with
/// rho_q(u) = q u for u >= 0 and (q - 1) u for u < 0.
/// Throws DataError when every target is NaN.
template <typename T>
double pinball_loss(std::span<const T> pred, std::span<const float> target, std::span<const double> levels);

/// d L / d yhat: -q_j / N where y - yhat >= 0 (kink included), (1 - q_j) / N otherwise; 0 at NaN targets.
template <typename T>
std::vector<T> pinball_grad(std::span<const T> pred, std::span<const float> target, std::span<const double> levels);

/// Number of non-NaN targets.
std::size_t valid_target_count(std::span<const float> target) noexcept;

/// Training kernel: writes (d L / d yhat) with an externally supplied 1/N
/// into `grad` and returns the un-normalised loss sum over all elements.
template <typename T>
double pinball_accumulate(std::span<const T> pred, std::span<const float> target, std::span<const double> levels,
                          double inv_n, std::span<T> grad);

}  // namespace drain::qunet
