#include "drain/grid.hpp"

#include <cmath>
#include <limits>

#include "drain/errors.hpp"

namespace drain {

GridSpec GridSpec::global(double cell_deg)
{
    if (!(cell_deg > 0.0)) {
        throw UsageError("grid cell size must be positive");
    }
    return GridSpec{-90.0, -180.0, cell_deg, static_cast<std::size_t>(std::ceil(180.0 / cell_deg - 1e-9)),
                    static_cast<std::size_t>(std::ceil(360.0 / cell_deg - 1e-9))};
}

GridSpec GridSpec::covering(const colocation::LatLonBox& box, double cell_deg)
{
    if (!(cell_deg > 0.0)) {
        throw UsageError("grid cell size must be positive");
    }
    if (!(box.lat_max > box.lat_min) || !(box.lon_max > box.lon_min)) {
        throw UsageError("grid box must have positive extent");
    }
    return GridSpec{box.lat_min, box.lon_min, cell_deg,
                    static_cast<std::size_t>(std::ceil((box.lat_max - box.lat_min) / cell_deg - 1e-9)),
                    static_cast<std::size_t>(std::ceil((box.lon_max - box.lon_min) / cell_deg - 1e-9))};
}

std::ptrdiff_t GridSpec::cell_of(LatLon p) const noexcept
{
    const double r = std::floor((p.lat - origin_lat) / cell_deg);
    const double c = std::floor((p.lon - origin_lon) / cell_deg);
    if (r < 0.0 || c < 0.0 || r >= static_cast<double>(rows) || c >= static_cast<double>(cols)) {
        return -1;
    }
    return static_cast<std::ptrdiff_t>(r) * static_cast<std::ptrdiff_t>(cols) + static_cast<std::ptrdiff_t>(c);
}

LatLon GridSpec::cell_center(std::size_t row, std::size_t col) const noexcept
{
    return {origin_lat + (static_cast<double>(row) + 0.5) * cell_deg,
            origin_lon + (static_cast<double>(col) + 0.5) * cell_deg};
}

GridField::GridField(GridSpec s)
    : spec(s), mean(s.size(), std::numeric_limits<double>::quiet_NaN()), count(s.size(), 0)
{
}

CsvTable grid_csv(const GridField& grid, bool occupied_only)
{
    CsvTable t({"row", "col", "lat_center", "lon_center", "mean", "count"});
    for (std::size_t r = 0; r < grid.spec.rows; ++r) {
        for (std::size_t c = 0; c < grid.spec.cols; ++c) {
            const auto i = r * grid.spec.cols + c;
            if (occupied_only && grid.count[i] == 0) {
                continue;
            }
            const auto center = grid.spec.cell_center(r, c);
            t.row({std::to_string(r), std::to_string(c), format_number(center.lat), format_number(center.lon),
                   format_number(grid.mean[i]), std::to_string(grid.count[i])});
        }
    }
    return t;
}

}  // namespace drain

namespace drain::colocation {

GridField grid_average(std::span<const float> lat, std::span<const float> lon, std::span<const float> values,
                       const GridSpec& spec, double min_value)
{
    if (!(spec.cell_deg > 0.0)) {
        throw UsageError("grid cell size must be positive");
    }
    if (lat.size() != values.size() || lon.size() != values.size()) {
        throw UsageError("grid_average inputs differ in length");
    }
    GridField out(spec);
    std::vector<double> sum(spec.size(), 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const float v = values[i];
        if (std::isnan(v) || !(static_cast<double>(v) > min_value)) {
            continue;
        }
        const auto cell = spec.cell_of({lat[i], lon[i]});
        if (cell < 0) {
            continue;
        }
        sum[static_cast<std::size_t>(cell)] += v;
        ++out.count[static_cast<std::size_t>(cell)];
    }
    for (std::size_t i = 0; i < spec.size(); ++i) {
        if (out.count[i] > 0) {
            out.mean[i] = sum[i] / static_cast<double>(out.count[i]);
        }
    }
    return out;
}

}  // namespace drain::colocation
