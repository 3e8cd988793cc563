#pragma once
// Shared helpers for the test binaries: small geolocated grids, scratch
// directories and independent reference computations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "drain/colocation.hpp"
#include "drain/geodesy.hpp"
#include "drain/swath.hpp"

namespace drain::test {

/// Regular grid starting at (lat0, lon0), `step` degrees between pixels.
inline Geolocation make_geo(std::size_t n_scan, std::size_t n_pix, double lat0 = 10.0, double lon0 = 20.0,
                            double step = 0.05, double t0 = 1.6e9)
{
    std::vector<float> lat(n_scan * n_pix);
    std::vector<float> lon(n_scan * n_pix);
    std::vector<double> time(n_scan);
    for (std::size_t s = 0; s < n_scan; ++s) {
        time[s] = t0 + 1.875 * static_cast<double>(s);
        for (std::size_t p = 0; p < n_pix; ++p) {
            lat[s * n_pix + p] = static_cast<float>(lat0 + step * static_cast<double>(s));
            lon[s * n_pix + p] = static_cast<float>(lon0 + step * static_cast<double>(p));
        }
    }
    return Geolocation(n_scan, n_pix, std::move(lat), std::move(lon), std::move(time));
}

inline RainField make_rain(std::vector<float> values, std::size_t n_scan, std::size_t n_pix,
                           Provenance prov = Provenance::Reference)
{
    return RainField(make_geo(n_scan, n_pix), std::move(values), prov);
}

/// Fresh, empty directory under the system temp dir; removed on destruction.
class ScratchDir {
public:
    explicit ScratchDir(const std::string& tag)
    {
        static std::uint64_t counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("drain_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~ScratchDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;
    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

// ---------------------------------------------------------------------------
// Oracles: independent reimplementations the library is checked against.

/// Great-circle distance from the dot product of unit vectors (atan2 form).
inline double vector_distance_km(LatLon a, LatLon b)
{
    constexpr double d2r = 3.14159265358979323846 / 180.0;
    const double ax = std::cos(a.lat * d2r) * std::cos(a.lon * d2r);
    const double ay = std::cos(a.lat * d2r) * std::sin(a.lon * d2r);
    const double az = std::sin(a.lat * d2r);
    const double bx = std::cos(b.lat * d2r) * std::cos(b.lon * d2r);
    const double by = std::cos(b.lat * d2r) * std::sin(b.lon * d2r);
    const double bz = std::sin(b.lat * d2r);
    const double cx = ay * bz - az * by;
    const double cy = az * bx - ax * bz;
    const double cz = ax * by - ay * bx;
    const double cross = std::sqrt(cx * cx + cy * cy + cz * cz);
    const double dot = ax * bx + ay * by + az * bz;
    return kEarthRadiusKm * std::atan2(cross, dot);
}

/// All-pairs contributor scan: ascending indices of finite samples within radius.
inline std::vector<std::uint32_t> brute_contributors(const std::vector<colocation::PointSample>& samples,
                                                     LatLon target, double radius_km)
{
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i].value)) {
            continue;
        }
        if (haversine_km(target, {samples[i].lat, samples[i].lon}) <= radius_km) {
            out.push_back(static_cast<std::uint32_t>(i));
        }
    }
    return out;
}

/// A randomized co-location problem: samples scattered around a centre that
/// may sit near a pole or the antimeridian, targets on a jittered grid.
struct ColocationCase {
    std::vector<colocation::PointSample> samples;
    Geolocation targets;
    double radius_km = 5.0;
};

inline ColocationCase random_colocation_case(std::mt19937_64& rng, std::size_t n_samples = 500,
                                             std::size_t n_targets = 100)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double lat_c = u(rng) < 0.2 ? (u(rng) < 0.5 ? -1 : 1) * (85.0 + 4.9 * u(rng)) : -80.0 + 160.0 * u(rng);
    const double lon_c = u(rng) < 0.3 ? (u(rng) < 0.5 ? -179.95 : 179.95) : -180.0 + 360.0 * u(rng);
    const double radius = 1.0 + 29.0 * u(rng);
    const double span_deg = 4.0 * radius / 111.0;
    auto wrap = [](double lon) { return wrap_longitude(lon); };
    auto clamp_lat = [](double lat) { return std::clamp(lat, -90.0, 90.0); };
    const double lon_scale = 1.0 / std::max(std::cos(lat_c * 3.14159265358979323846 / 180.0), 0.05);

    ColocationCase c;
    c.radius_km = radius;
    for (std::size_t i = 0; i < n_samples; ++i) {
        colocation::PointSample s;
        s.lat = clamp_lat(lat_c + span_deg * (2 * u(rng) - 1));
        s.lon = wrap(lon_c + span_deg * lon_scale * (2 * u(rng) - 1));
        s.value = u(rng) < 0.05 ? NAN : 20.0 * u(rng);
        s.time = 0.0;
        c.samples.push_back(s);
    }
    std::vector<float> lat(n_targets), lon(n_targets);
    for (std::size_t i = 0; i < n_targets; ++i) {
        lat[i] = static_cast<float>(clamp_lat(lat_c + span_deg * (2 * u(rng) - 1)));
        lon[i] = static_cast<float>(wrap(lon_c + span_deg * lon_scale * (2 * u(rng) - 1)));
    }
    c.targets = Geolocation(1, n_targets, std::move(lat), std::move(lon), {0.0});
    return c;
}

/// Empirical q-quantile by minimising the mean pinball loss over a fine grid.
inline double grid_search_quantile(const std::vector<double>& ys, double q, double lo, double hi, double step)
{
    double best = lo;
    double best_loss = INFINITY;
    const auto n_steps = static_cast<std::size_t>(std::llround((hi - lo) / step));
    for (std::size_t k = 0; k <= n_steps; ++k) {
        const double c = lo + step * static_cast<double>(k);
        double loss = 0.0;
        for (double y : ys) {
            const double u = y - c;
            loss += u >= 0 ? q * u : (q - 1.0) * u;
        }
        if (loss < best_loss) {
            best_loss = loss;
            best = c;
        }
    }
    return best;
}

}  // namespace drain::test
