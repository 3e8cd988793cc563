#pragma once

// Synthetic stand-in for co-located radiometer/radar scenes.
//
// A scene is a set of elliptical Gaussian rain cells on a local kilometre
// frame. The "truth" rain is the cell field at pixel centres; the radar
// reference is the radius-mean of point samples on a denser grid; the
// brightness temperatures come from a monotone scattering-depression model
//   TB_ch = TB0_ch + offset_ch(surface) - a_ch * rain^b_ch + noise
// clamped to [50, 350] K.

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "drain/colocation.hpp"
#include "drain/mosaic.hpp"
#include "drain/surface_mask.hpp"
#include "drain/swath.hpp"

namespace drain::dataset {

using Rng = std::mt19937_64;
using ChannelCoeffs = std::array<double, kTbChannels>;

struct SynthConfig {
    std::size_t n_scan = 64;
    std::size_t n_pix = 64;
    double pixel_km = 5.0;

    double cell_rate = 6.0;                 // Poisson mean number of rain cells
    double peak_log_mu = 2.0794415416798357;  // ln(8 mm/hr)
    double peak_log_sigma = 0.8;
    double radius_min_km = 8.0;             // Gaussian sigma per ellipse axis
    double radius_max_km = 30.0;
    double support_fraction = 0.01;         // a cell is zero where it falls below this fraction of its peak

    ChannelCoeffs tb0{270.0, 265.0, 280.0, 275.0};
    ChannelCoeffs depression{4.0, 4.0, 12.0, 12.0};
    ChannelCoeffs exponent{0.6, 0.6, 0.6, 0.6};
    ChannelCoeffs noise_k{1.0, 1.0, 1.0, 1.0};
    ChannelCoeffs ocean_offset{0.0, 0.0, 0.0, 0.0};
    ChannelCoeffs land_offset{0.0, 10.0, 0.0, 10.0};

    double radar_spacing_km = 4.75;  // ~3.5 radar samples inside a 5 km radius
    double colocation_radius_km = colocation::kDefaultRadiusKm;

    double lat_min = -60.0;
    double lat_max = 60.0;
    double time_start = 1546300800.0;  // 2019-01-01T00:00:00Z
    double time_span = 365.0 * 86400.0;
    double scan_period_s = 1.875;

    std::uint64_t seed = 42;

    void validate() const;
};

struct RainCell {
    double x_km = 0.0;  // across-track
    double y_km = 0.0;  // along-track
    double peak = 0.0;  // mm/hr
    double sigma_major_km = 0.0;
    double sigma_minor_km = 0.0;
    double angle_rad = 0.0;
};

/// Local equirectangular frame anchored at the scene's first pixel.
struct SceneFrame {
    double lat0 = 0.0;
    double lon0 = 0.0;
    double pixel_km = 5.0;

    LatLon to_latlon(double x_km, double y_km) const noexcept;
    std::array<double, 2> to_km(LatLon p) const noexcept;
};

/// Rain cells plus the scene frame; evaluates the continuous rain field.
class RainCellModel {
public:
    RainCellModel(SynthConfig cfg, SceneFrame frame, std::vector<RainCell> cells, double t0);

    static RainCellModel draw(const SynthConfig& cfg, Rng& rng);

    double rate_at_km(double x_km, double y_km) const noexcept;
    double rate_at(LatLon p) const noexcept { auto xy = frame_.to_km(p); return rate_at_km(xy[0], xy[1]); }

    Geolocation geolocation() const;
    RainField rasterize() const;

    /// Radar-like point samples on a jittered grid covering the scene plus a radius margin.
    std::vector<colocation::PointSample> radar_samples(Rng& rng) const;

    const SceneFrame& frame() const noexcept { return frame_; }
    const std::vector<RainCell>& cells() const noexcept { return cells_; }
    double start_time() const noexcept { return t0_; }

private:
    SynthConfig cfg_;
    SceneFrame frame_;
    std::vector<RainCell> cells_;
    double t0_;
};

/// Truth rain on a freshly drawn scene.
RainField synth_rain(const SynthConfig& cfg, Rng& rng);

/// Forward brightness-temperature model applied pixelwise to `rain`.
TbScene synth_tb(const RainField& rain, const SurfaceMask& mask, const SynthConfig& cfg, Rng& rng,
                 std::string granule_id = "synthetic");

/// Noiseless inverse of the forward model for one channel.
double invert_tb(double tb, double offset, std::size_t channel, const SynthConfig& cfg) noexcept;

/// Pixel-by-pixel comparison estimator: inverts 89V with no spatial context.
RainField pixelwise_estimate(const TbScene& scene, const SynthConfig& cfg);

struct SynthScene {
    RainCellModel model;
    RainField truth;
    RainField reference;
    TbScene tb;
};

/// Full generator for scene `index`: per-scene rng seeded with seed XOR index.
SynthScene synth_scene(const SynthConfig& cfg, const SurfaceMask& mask, std::uint64_t index);

/// Global land/ocean raster made of random continental blobs.
SurfaceMask synth_surface_mask(double cell_deg, std::uint64_t seed);

/// Mosaic frames (5-min accumulation) of the scene's rain field on a grid
/// covering the scene, at the given times. Quality drops below 80 inside a
/// random patch.
std::vector<colocation::MosaicFrame> synth_mosaic_frames(const RainCellModel& model, double cell_deg,
                                                         std::span<const double> times, Rng& rng);

}  // namespace drain::dataset
