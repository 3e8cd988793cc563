#pragma once

// Core swath data model: geolocated brightness-temperature scenes, rain
// fields and per-pixel quantile stacks. All planes are row-major with the
// scan index varying slowest.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "drain/geodesy.hpp"

namespace drain {

/// Fixed input channel order of a TbScene.
enum class Channel : std::size_t { V37 = 0, H37 = 1, V89 = 2, H89 = 3 };

inline constexpr std::size_t kTbChannels = 4;
inline constexpr std::size_t kQuantileLevels = 99;
inline constexpr float kTbMin = 50.0f;
inline constexpr float kTbMax = 350.0f;

const char* channel_name(Channel c) noexcept;

/// Per-pixel geolocation plus per-scan times (seconds since epoch).
class Geolocation {
public:
    Geolocation() = default;
    Geolocation(std::size_t n_scan, std::size_t n_pix, std::vector<float> lat,
                std::vector<float> lon, std::vector<double> scan_time);

    std::size_t n_scan() const noexcept { return n_scan_; }
    std::size_t n_pix() const noexcept { return n_pix_; }
    std::size_t size() const noexcept { return n_scan_ * n_pix_; }
    std::size_t index(std::size_t scan, std::size_t pix) const noexcept { return scan * n_pix_ + pix; }

    std::span<const float> lat() const noexcept { return lat_; }
    std::span<const float> lon() const noexcept { return lon_; }
    std::span<const double> scan_time() const noexcept { return scan_time_; }

    LatLon at(std::size_t i) const noexcept { return {lat_[i], lon_[i]}; }

    /// Keeps the leading n_scan x n_pix block.
    Geolocation cropped(std::size_t n_scan, std::size_t n_pix) const;

    bool same_grid(const Geolocation& other) const noexcept;

private:
    std::size_t n_scan_ = 0;
    std::size_t n_pix_ = 0;
    std::vector<float> lat_;
    std::vector<float> lon_;
    std::vector<double> scan_time_;
};

/// Four-channel radiometer tile. Missing brightness temperatures are NaN.
class TbScene {
public:
    TbScene() = default;
    TbScene(std::string granule_id, Geolocation geo, std::vector<float> tb);

    const std::string& granule_id() const noexcept { return granule_id_; }
    const Geolocation& geo() const noexcept { return geo_; }
    std::size_t n_scan() const noexcept { return geo_.n_scan(); }
    std::size_t n_pix() const noexcept { return geo_.n_pix(); }

    std::span<const float> values() const noexcept { return tb_; }
    std::span<const float> plane(Channel c) const noexcept;
    float at(Channel c, std::size_t scan, std::size_t pix) const noexcept
    {
        return plane(c)[geo_.index(scan, pix)];
    }

private:
    std::string granule_id_;
    Geolocation geo_;
    std::vector<float> tb_;
};

enum class Provenance : std::uint8_t { Reference, Retrieval, ExternalEstimator };

const char* to_string(Provenance p) noexcept;

/// Surface rain rate in mm/hr aligned with a swath grid.
class RainField {
public:
    RainField() = default;
    RainField(Geolocation geo, std::vector<float> rate, Provenance provenance);

    const Geolocation& geo() const noexcept { return geo_; }
    Provenance provenance() const noexcept { return provenance_; }
    std::size_t n_scan() const noexcept { return geo_.n_scan(); }
    std::size_t n_pix() const noexcept { return geo_.n_pix(); }
    std::size_t size() const noexcept { return rate_.size(); }

    std::span<const float> values() const noexcept { return rate_; }
    float at(std::size_t scan, std::size_t pix) const noexcept { return rate_[geo_.index(scan, pix)]; }

private:
    Geolocation geo_;
    std::vector<float> rate_;
    Provenance provenance_ = Provenance::Reference;
};

/// Per-pixel stack of rain-rate quantiles. Level j (0-based) sits at
/// probability (j + 1) / (n_levels + 1), i.e. j/100 for the usual 99 levels.
class QuantileField {
public:
    QuantileField() = default;
    QuantileField(Geolocation geo, std::vector<float> values, std::size_t n_levels = kQuantileLevels);

    const Geolocation& geo() const noexcept { return geo_; }
    std::size_t n_levels() const noexcept { return n_levels_; }
    std::size_t n_pixels() const noexcept { return geo_.size(); }
    double level(std::size_t j) const noexcept
    {
        return static_cast<double>(j + 1) / static_cast<double>(n_levels_ + 1);
    }

    std::span<const float> values() const noexcept { return values_; }
    std::span<const float> plane(std::size_t j) const noexcept;
    float value(std::size_t j, std::size_t pixel) const noexcept { return values_[j * geo_.size() + pixel]; }

private:
    Geolocation geo_;
    std::vector<float> values_;
    std::size_t n_levels_ = kQuantileLevels;
};

/// Largest multiple of `multiple` not exceeding `n`; throws TileError when n < multiple.
std::size_t tile_extent(std::size_t n, std::size_t multiple);

/// Trailing-edge crop to dimensions divisible by `multiple`.
TbScene crop_to_tile(const TbScene& scene, std::size_t multiple = 16);
RainField crop_to_tile(const RainField& field, std::size_t multiple = 16);
QuantileField crop_to_tile(const QuantileField& field, std::size_t multiple = 16);

}  // namespace drain
