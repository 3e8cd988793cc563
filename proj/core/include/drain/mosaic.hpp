#pragma once

// Ground-radar mosaic frames: 5-minute accumulations on a regular lat/lon
// grid with a per-cell quality percentage.
//
// MOS1 file: "MOS1" | u32 rows | u32 cols | f64 origin lat | f64 origin lon
//            | f64 cell size (deg) | f64 timestamp | rows x cols f32 accumulation (mm)
//            | rows x cols u8 quality (0..100)
// Origin is the south-west corner of cell (0, 0); rows grow northward.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "drain/colocation.hpp"

namespace drain::colocation {

inline constexpr double kAccumulationToRate = 12.0;  // 5-minute mm -> mm/hr
inline constexpr int kDefaultQualityMin = 80;

struct MosaicFrame {
    std::size_t rows = 0;
    std::size_t cols = 0;
    double origin_lat = 0.0;
    double origin_lon = 0.0;
    double cell_deg = 0.0;
    double time = 0.0;
    std::vector<float> accumulation;
    std::vector<std::uint8_t> quality;

    /// Throws DataError when planes or values are inconsistent.
    void validate() const;
    LatLon cell_center(std::size_t row, std::size_t col) const noexcept;
};

/// Rates on the mosaic grid (mm/hr); NaN where quality is too low or data missing.
struct MosaicRates {
    std::size_t rows = 0;
    std::size_t cols = 0;
    double origin_lat = 0.0;
    double origin_lon = 0.0;
    double cell_deg = 0.0;
    double time = 0.0;
    std::vector<float> rate;
};

MosaicRates mosaic_to_rate(const MosaicFrame& frame, int quality_min = kDefaultQualityMin);

/// Finite-rate cells as point samples at their cell centres, optionally
/// restricted to a box.
std::vector<PointSample> mosaic_samples(const MosaicRates& rates, const LatLonBox& box = {});

/// Index of the time closest to `t` in an ascending list; ties go to the earlier entry.
std::size_t nearest_time_index(std::span<const double> times, double t);

/// Frame closest in time to the overpass middle time.
const MosaicFrame& nearest_time_frame(std::span<const MosaicFrame> frames, double overpass_mid);

void write_mosaic(const std::filesystem::path& path, const MosaicFrame& frame);
MosaicFrame read_mosaic(const std::filesystem::path& path);

}  // namespace drain::colocation
