#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "drain/geodesy.hpp"
#include "drain/swath.hpp"

namespace drain::colocation {

inline constexpr double kDefaultRadiusKm = 5.0;

/// A reference rain observation, e.g. one radar surface-rain pixel.
struct PointSample {
    double lat = 0.0;
    double lon = 0.0;
    double value = 0.0;  ///< mm/hr, >= 0 or NaN
    double time = 0.0;   ///< seconds since epoch
};

/// Lat/lon bucket grid answering "which samples lie within radius_km of a point".
/// Buckets are radius-sized in latitude; the longitude search window widens
/// with latitude and covers the whole ring near the poles.
class RadiusIndex {
public:
    RadiusIndex(std::span<const PointSample> samples, double radius_km);

    double radius_km() const noexcept { return radius_km_; }

    /// Ascending indices of finite-valued samples with haversine distance <= radius_km.
    std::vector<std::uint32_t> contributors(LatLon target) const;

private:
    std::int64_t row_of(double lat) const noexcept;
    std::int64_t col_of(double lon) const noexcept;
    std::uint64_t key(std::int64_t row, std::int64_t col) const noexcept;

    std::span<const PointSample> samples_;
    double radius_km_;
    double bucket_deg_;
    std::int64_t n_rows_;
    std::int64_t n_cols_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets_;
};

/// Contributor sets for every pixel of `targets`, via RadiusIndex.
std::vector<std::vector<std::uint32_t>> colocate_contributors(std::span<const PointSample> samples,
                                                              const Geolocation& targets,
                                                              double radius_km = kDefaultRadiusKm);

/// Arithmetic mean of sample values within radius_km (inclusive) of each
/// pixel centre. Pixels without contributors are NaN. The sum runs over the
/// contributing values in ascending order, so the result does not depend on
/// the order of `samples`.
RainField colocate_radius_mean(std::span<const PointSample> samples, const Geolocation& targets,
                               double radius_km = kDefaultRadiusKm,
                               Provenance provenance = Provenance::Reference);

/// Closed latitude/longitude box in degrees.
struct LatLonBox {
    double lat_min = -90.0;
    double lat_max = 90.0;
    double lon_min = -180.0;
    double lon_max = 180.0;

    bool contains(LatLon p) const noexcept
    {
        return p.lat >= lat_min && p.lat <= lat_max && p.lon >= lon_min && p.lon <= lon_max;
    }
};

/// The ground-mosaic validation domain (8W-12E, 39N-54N).
inline constexpr LatLonBox kMosaicDomain{39.0, 54.0, -8.0, 12.0};

/// Number of scene pixel centres inside the closed box.
std::size_t overpass_coverage(const Geolocation& geo, const LatLonBox& box) noexcept;

/// Mean of first and last scan time.
double overpass_mid_time(const Geolocation& geo) noexcept;

}  // namespace drain::colocation
