#pragma once

// Land/ocean raster used only after retrieval, to stratify scores.
// MSK1 file: "MSK1" | u32 rows | u32 cols | f64 origin lat | f64 origin lon
//            | f64 cell size (deg) | rows x cols u8 classes (row-major).
// The origin is the south-west corner; row index grows northward.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "drain/geodesy.hpp"

namespace drain {

enum class SurfaceClass : std::uint8_t { Ocean = 0, Land = 1 };

const char* to_string(SurfaceClass c) noexcept;

class SurfaceMask {
public:
    SurfaceMask(std::size_t rows, std::size_t cols, double origin_lat, double origin_lon, double cell_deg,
                std::vector<std::uint8_t> classes);

    /// Global mask of a single class.
    static SurfaceMask uniform(SurfaceClass cls, double cell_deg = 1.0);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double origin_lat() const noexcept { return origin_lat_; }
    double origin_lon() const noexcept { return origin_lon_; }
    double cell_deg() const noexcept { return cell_deg_; }
    std::span<const std::uint8_t> classes() const noexcept { return classes_; }

    /// Row/col of the cell containing the point (floor rule, clamped to the raster).
    std::size_t row_of(double lat) const noexcept;
    std::size_t col_of(double lon) const noexcept;

    SurfaceClass lookup(LatLon p) const noexcept;

private:
    std::size_t rows_;
    std::size_t cols_;
    double origin_lat_;
    double origin_lon_;
    double cell_deg_;
    std::vector<std::uint8_t> classes_;
};

inline SurfaceClass mask_lookup(const SurfaceMask& mask, double lat, double lon) noexcept
{
    return mask.lookup({lat, lon});
}

void write_mask(const std::filesystem::path& path, const SurfaceMask& mask);
SurfaceMask read_mask(const std::filesystem::path& path);

}  // namespace drain
