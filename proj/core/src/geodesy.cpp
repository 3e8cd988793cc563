#include "drain/geodesy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace drain {

double haversine_km(LatLon a, LatLon b) noexcept
{
    constexpr double rad = std::numbers::pi / 180.0;
    const double phi1 = a.lat * rad;
    const double phi2 = b.lat * rad;
    const double dphi = (b.lat - a.lat) * rad;
    const double dlambda = (b.lon - a.lon) * rad;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    h = std::clamp(h, 0.0, 1.0);
    return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

double wrap_longitude(double lon) noexcept
{
    double w = std::fmod(lon + 180.0, 360.0);
    if (w < 0.0) {
        w += 360.0;
    }
    w -= 180.0;
    // fmod can land exactly on +180 after the shift back.
    if (w >= 180.0) {
        w -= 360.0;
    }
    return w;
}

bool valid_latlon(LatLon p) noexcept
{
    return p.lat >= -90.0 && p.lat <= 90.0 && p.lon >= -180.0 && p.lon < 180.0;
}

}  // namespace drain
