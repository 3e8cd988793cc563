#pragma once

// Gridded difference maps (reference minus estimate).

#include <span>

#include "drain/grid.hpp"

namespace drain::eval {

/// Cellwise ref.mean - est.mean; NaN (count 0) where either cell is empty.
/// The count is the smaller of the two. Throws UsageError on differing geometry.
GridField grid_difference(const GridField& ref, const GridField& est);

/// Per-pixel (ref - est) over pixels where both are finite, then averaged per cell.
GridField pixel_difference_grid(std::span<const float> lat, std::span<const float> lon,
                                std::span<const float> ref, std::span<const float> est, const GridSpec& spec);

}  // namespace drain::eval
