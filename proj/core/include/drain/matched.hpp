#pragma once

// Co-located pixel sets pooled across scenes, and land/ocean stratification.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "drain/quantiles.hpp"
#include "drain/surface_mask.hpp"
#include "drain/swath.hpp"

namespace drain::eval {

/// Parallel per-pixel arrays. The band arrays are either empty or full length.
struct MatchedPixels {
    std::vector<float> ref;
    std::vector<float> est;
    std::vector<float> lat;
    std::vector<float> lon;
    std::vector<double> time;
    std::vector<float> lo50, hi50, lo90, hi90;

    std::size_t size() const noexcept { return ref.size(); }
    bool has_bands() const noexcept { return size() > 0 && lo50.size() == size(); }

    /// Appends every pixel of a scene; fields must share a grid. Pixel time is its scan time.
    void append(const RainField& ref_field, const RainField& est_field);
    /// As above, with the median of `qf` as estimate and its 50% / 90% bands.
    void append(const RainField& ref_field, const QuantileField& qf);

    MatchedPixels subset(std::span<const std::size_t> indices) const;
};

enum class Stratum { Land, Ocean, Total };
const char* to_string(Stratum s) noexcept;  // "LAND" / "OCEAN" / "TOTAL"

template <typename R>
struct Stratified {
    R land;
    R ocean;
    R total;

    const R& operator[](Stratum s) const noexcept
    {
        return s == Stratum::Land ? land : s == Stratum::Ocean ? ocean : total;
    }
};

/// Indices of land and ocean pixels, in order.
std::array<std::vector<std::size_t>, 2> surface_partition(const MatchedPixels& px, const SurfaceMask& mask);

/// Applies `metric` to the land pixels, the ocean pixels and all pixels.
template <typename Metric>
auto stratify_by_surface(const MatchedPixels& px, const SurfaceMask& mask, Metric&& metric)
    -> Stratified<decltype(metric(px))>
{
    const auto parts = surface_partition(px, mask);
    const auto land = px.subset(parts[0]);
    const auto ocean = px.subset(parts[1]);
    return {metric(land), metric(ocean), metric(px)};
}

}  // namespace drain::eval
