#include "drain/mosaic.hpp"

#include <cmath>
#include <limits>

#include "binary_io.hpp"
#include "drain/errors.hpp"

namespace drain::colocation {

void MosaicFrame::validate() const
{
    if (rows == 0 || cols == 0 || !(cell_deg > 0.0)) {
        throw DataError("mosaic frame needs positive dimensions and cell size");
    }
    if (accumulation.size() != rows * cols || quality.size() != rows * cols) {
        throw DataError("mosaic planes do not match rows x cols");
    }
    for (float a : accumulation) {
        if (!std::isnan(a) && !(a >= 0.0f)) {
            throw DataError("negative mosaic accumulation");
        }
    }
    for (auto q : quality) {
        if (q > 100) {
            throw DataError("mosaic quality outside [0, 100]");
        }
    }
}

LatLon MosaicFrame::cell_center(std::size_t row, std::size_t col) const noexcept
{
    return {origin_lat + (static_cast<double>(row) + 0.5) * cell_deg,
            origin_lon + (static_cast<double>(col) + 0.5) * cell_deg};
}

MosaicRates mosaic_to_rate(const MosaicFrame& frame, int quality_min)
{
    frame.validate();
    MosaicRates out{frame.rows, frame.cols, frame.origin_lat, frame.origin_lon, frame.cell_deg, frame.time, {}};
    out.rate.resize(frame.accumulation.size());
    for (std::size_t i = 0; i < frame.accumulation.size(); ++i) {
        out.rate[i] = static_cast<int>(frame.quality[i]) >= quality_min
                          ? frame.accumulation[i] * static_cast<float>(kAccumulationToRate)
                          : std::numeric_limits<float>::quiet_NaN();
    }
    return out;
}

std::vector<PointSample> mosaic_samples(const MosaicRates& rates, const LatLonBox& box)
{
    std::vector<PointSample> out;
    for (std::size_t r = 0; r < rates.rows; ++r) {
        const double lat = rates.origin_lat + (static_cast<double>(r) + 0.5) * rates.cell_deg;
        if (lat < box.lat_min || lat > box.lat_max) {
            continue;
        }
        for (std::size_t c = 0; c < rates.cols; ++c) {
            const float v = rates.rate[r * rates.cols + c];
            if (std::isnan(v)) {
                continue;
            }
            const double lon = rates.origin_lon + (static_cast<double>(c) + 0.5) * rates.cell_deg;
            if (lon < box.lon_min || lon > box.lon_max) {
                continue;
            }
            out.push_back({lat, lon, static_cast<double>(v), rates.time});
        }
    }
    return out;
}

std::size_t nearest_time_index(std::span<const double> times, double t)
{
    if (times.empty()) {
        throw DataError("no mosaic frames to match against");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (times[i] < times[i - 1]) {
            throw UsageError("mosaic frames must be sorted by time");
        }
    }
    std::size_t best = 0;
    double best_gap = std::abs(times[0] - t);
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double gap = std::abs(times[i] - t);
        if (gap < best_gap) {
            best = i;
            best_gap = gap;
        }
    }
    return best;
}

const MosaicFrame& nearest_time_frame(std::span<const MosaicFrame> frames, double overpass_mid)
{
    std::vector<double> times;
    times.reserve(frames.size());
    for (const auto& f : frames) {
        times.push_back(f.time);
    }
    return frames[nearest_time_index(times, overpass_mid)];
}

void write_mosaic(const std::filesystem::path& path, const MosaicFrame& frame)
{
    frame.validate();
    detail::ByteWriter w;
    w.magic("MOS1");
    w.put(static_cast<std::uint32_t>(frame.rows));
    w.put(static_cast<std::uint32_t>(frame.cols));
    w.put(frame.origin_lat);
    w.put(frame.origin_lon);
    w.put(frame.cell_deg);
    w.put(frame.time);
    w.put_all<float>(frame.accumulation);
    w.put_all<std::uint8_t>(frame.quality);
    w.save(path);
}

MosaicFrame read_mosaic(const std::filesystem::path& path)
{
    auto r = detail::ByteReader::from_file(path);
    r.expect_magic("MOS1");
    MosaicFrame f;
    f.rows = r.get<std::uint32_t>();
    f.cols = r.get<std::uint32_t>();
    f.origin_lat = r.get<double>();
    f.origin_lon = r.get<double>();
    f.cell_deg = r.get<double>();
    f.time = r.get<double>();
    f.accumulation = r.get_all<float>(f.rows * f.cols);
    f.quality = r.get_all<std::uint8_t>(f.rows * f.cols);
    r.expect_end();
    f.validate();
    return f;
}

}  // namespace drain::colocation
