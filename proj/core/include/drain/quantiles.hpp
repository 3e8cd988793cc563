#pragma once

// Post-processing of per-pixel quantile stacks: crossing repair, point
// estimates, confidence bands, numerical densities and rain masks.

#include <cstdint>
#include <span>
#include <vector>

#include "drain/swath.hpp"

namespace drain::quantiles {

inline constexpr double kRainThreshold = 1e-4;  // mm/hr

/// Sorts each pixel's values ascending (NaN last), then clamps negatives to 0.
QuantileField monotonize(const QuantileField& qf);

/// 0-based plane holding probability `level`; throws UsageError unless
/// level * (n_levels + 1) is an integer in [1, n_levels].
std::size_t plane_index(const QuantileField& qf, double level);

/// The plane at `level` as a retrieval; the median by default.
RainField point_estimate(const QuantileField& qf, double level = 0.5);

struct ConfidenceBand {
    double level = 0.0;
    RainField lower;
    RainField upper;
};

/// level 0.50 -> (q25, q75); 0.90 -> (q5, q95). Other levels throw UsageError.
ConfidenceBand confidence_band(const QuantileField& qf, double level);

/// CDF through the knots (x_j, p_j), linear between knots, flat at p_1 below
/// and p_n above. Left-continuous at repeated knots, so a point mass at c
/// belongs to the half-open bin starting at c.
double cdf_at(std::span<const float> knots, std::span<const double> levels, double x);

/// Probability mass per bin [e_k, e_{k+1}) for one pixel.
std::vector<double> bin_mass(std::span<const float> knots, std::span<const double> levels,
                             std::span<const double> edges);

struct PdfField {
    std::vector<double> edges;
    std::size_t n_pixels = 0;
    std::vector<double> density;  // [bin][pixel], mass / width

    double at(std::size_t bin, std::size_t pixel) const noexcept { return density[bin * n_pixels + pixel]; }
};

/// Per-pixel density histogram. Edges must be strictly increasing.
PdfField pdf_from_cdf(const QuantileField& qf, std::span<const double> edges);

/// value > threshold; NaN is no rain.
inline bool is_rain(float v, double threshold = kRainThreshold) noexcept
{
    return static_cast<double>(v) > threshold;
}

std::vector<std::uint8_t> rain_mask(const RainField& field, double threshold = kRainThreshold);

}  // namespace drain::quantiles
