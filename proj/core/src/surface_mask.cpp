#include "drain/surface_mask.hpp"

#include <algorithm>
#include <cmath>

#include "binary_io.hpp"
#include "drain/errors.hpp"

namespace drain {

const char* to_string(SurfaceClass c) noexcept
{
    return c == SurfaceClass::Land ? "LAND" : "OCEAN";
}

SurfaceMask::SurfaceMask(std::size_t rows, std::size_t cols, double origin_lat, double origin_lon, double cell_deg,
                         std::vector<std::uint8_t> classes)
    : rows_(rows), cols_(cols), origin_lat_(origin_lat), origin_lon_(origin_lon), cell_deg_(cell_deg),
      classes_(std::move(classes))
{
    if (!(cell_deg_ > 0.0) || rows_ == 0 || cols_ == 0) {
        throw DataError("surface mask needs positive cell size and dimensions");
    }
    if (classes_.size() != rows_ * cols_) {
        throw DataError("surface mask class plane does not match rows x cols");
    }
    constexpr double slack = 1e-9;
    if (origin_lat_ > -90.0 + slack || origin_lon_ > -180.0 + slack ||
        origin_lat_ + static_cast<double>(rows_) * cell_deg_ < 90.0 - slack ||
        origin_lon_ + static_cast<double>(cols_) * cell_deg_ < 180.0 - slack) {
        throw DataError("surface mask does not cover [-90, 90] x [-180, 180)");
    }
    for (auto c : classes_) {
        if (c > 1) {
            throw DataError("surface mask class must be 0 (ocean) or 1 (land)");
        }
    }
}

SurfaceMask SurfaceMask::uniform(SurfaceClass cls, double cell_deg)
{
    const auto rows = static_cast<std::size_t>(std::ceil(180.0 / cell_deg - 1e-9));
    const auto cols = static_cast<std::size_t>(std::ceil(360.0 / cell_deg - 1e-9));
    return SurfaceMask(rows, cols, -90.0, -180.0, cell_deg,
                       std::vector<std::uint8_t>(rows * cols, static_cast<std::uint8_t>(cls)));
}

std::size_t SurfaceMask::row_of(double lat) const noexcept
{
    const double r = std::floor((lat - origin_lat_) / cell_deg_);
    return static_cast<std::size_t>(std::clamp(r, 0.0, static_cast<double>(rows_ - 1)));
}

std::size_t SurfaceMask::col_of(double lon) const noexcept
{
    const double c = std::floor((lon - origin_lon_) / cell_deg_);
    return static_cast<std::size_t>(std::clamp(c, 0.0, static_cast<double>(cols_ - 1)));
}

SurfaceClass SurfaceMask::lookup(LatLon p) const noexcept
{
    return static_cast<SurfaceClass>(classes_[row_of(p.lat) * cols_ + col_of(p.lon)]);
}

void write_mask(const std::filesystem::path& path, const SurfaceMask& mask)
{
    detail::ByteWriter w;
    w.magic("MSK1");
    w.put(static_cast<std::uint32_t>(mask.rows()));
    w.put(static_cast<std::uint32_t>(mask.cols()));
    w.put(mask.origin_lat());
    w.put(mask.origin_lon());
    w.put(mask.cell_deg());
    w.put_all<std::uint8_t>(mask.classes());
    w.save(path);
}

SurfaceMask read_mask(const std::filesystem::path& path)
{
    auto r = detail::ByteReader::from_file(path);
    r.expect_magic("MSK1");
    const auto rows = r.get<std::uint32_t>();
    const auto cols = r.get<std::uint32_t>();
    const auto lat0 = r.get<double>();
    const auto lon0 = r.get<double>();
    const auto cell = r.get<double>();
    auto classes = r.get_all<std::uint8_t>(static_cast<std::size_t>(rows) * cols);
    r.expect_end();
    return SurfaceMask(rows, cols, lat0, lon0, cell, std::move(classes));
}

}  // namespace drain
