#pragma once

namespace drain {

/// Mean Earth radius used for every great-circle distance in the library.
inline constexpr double kEarthRadiusKm = 6371.0;

struct LatLon {
    double lat = 0.0;  ///< degrees, [-90, 90]
    double lon = 0.0;  ///< degrees, [-180, 180)
};

/// Great-circle distance on the sphere of radius kEarthRadiusKm.
double haversine_km(LatLon a, LatLon b) noexcept;

/// Kilometres per degree of arc along a meridian.
constexpr double km_per_degree() noexcept
{
    return kEarthRadiusKm * 3.14159265358979323846 / 180.0;
}

/// Wraps a longitude into [-180, 180).
double wrap_longitude(double lon) noexcept;

bool valid_latlon(LatLon p) noexcept;

}  // namespace drain
