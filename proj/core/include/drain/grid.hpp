#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "drain/colocation.hpp"
#include "drain/csv.hpp"

namespace drain {

/// Regular lat/lon grid. Cell (row, col) spans
/// [origin_lat + row*cell, origin_lat + (row+1)*cell) and likewise in longitude.
struct GridSpec {
    double origin_lat = -90.0;
    double origin_lon = -180.0;
    double cell_deg = 1.0;
    std::size_t rows = 180;
    std::size_t cols = 360;

    static GridSpec global(double cell_deg);
    static GridSpec covering(const colocation::LatLonBox& box, double cell_deg);

    bool operator==(const GridSpec&) const = default;

    /// Cell index of a point, or -1 outside the grid.
    std::ptrdiff_t cell_of(LatLon p) const noexcept;
    LatLon cell_center(std::size_t row, std::size_t col) const noexcept;
    std::size_t size() const noexcept { return rows * cols; }
};

/// Per-cell mean (mm/hr) and contributing-pixel count; mean is NaN iff count is 0.
struct GridField {
    GridSpec spec;
    std::vector<double> mean;
    std::vector<std::uint64_t> count;

    explicit GridField(GridSpec s);
    GridField() = default;
};

/// GridField CSV: row,col,lat_center,lon_center,mean,count for every cell,
/// or only for cells with data.
CsvTable grid_csv(const GridField& grid, bool occupied_only = false);

}  // namespace drain

namespace drain::colocation {

/// Mean over pixels with value > min_value (NaN excluded) per grid cell.
/// Pixels outside the grid are ignored.
GridField grid_average(std::span<const float> lat, std::span<const float> lon, std::span<const float> values,
                       const GridSpec& spec, double min_value);

}  // namespace drain::colocation
