#include "drain/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "drain/errors.hpp"

namespace drain::dataset {

namespace {

constexpr double kRad = std::numbers::pi / 180.0;

double uniform(Rng& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

float to_f32_lon(double lon)
{
    auto f = static_cast<float>(wrap_longitude(lon));
    return f >= 180.0f ? -180.0f : f;
}

}  // namespace

void SynthConfig::validate() const
{
    if (n_scan < 1 || n_pix < 1 || !(pixel_km > 0.0)) {
        throw UsageError("synth: image size and pixel_km must be positive");
    }
    if (!(cell_rate >= 0.0) || !(peak_log_sigma >= 0.0) || !(radius_min_km > 0.0) ||
        !(radius_max_km >= radius_min_km) || !(support_fraction > 0.0 && support_fraction < 1.0)) {
        throw UsageError("synth: rain cell parameters out of range");
    }
    for (std::size_t c = 0; c < kTbChannels; ++c) {
        if (!(depression[c] > 0.0) || !(exponent[c] > 0.0) || !(noise_k[c] >= 0.0) || !(tb0[c] > 0.0)) {
            throw UsageError("synth: TB forward coefficients must be positive");
        }
    }
    if (!(radar_spacing_km > 0.0) || !(colocation_radius_km > 0.0) || !(scan_period_s > 0.0)) {
        throw UsageError("synth: radar spacing, radius and scan period must be positive");
    }
    if (!(lat_min >= -90.0 && lat_max <= 90.0 && lat_min < lat_max) || !(time_span >= 0.0)) {
        throw UsageError("synth: latitude range or time span invalid");
    }
}

LatLon SceneFrame::to_latlon(double x_km, double y_km) const noexcept
{
    const double lat = lat0 + y_km / km_per_degree();
    const double lon = lon0 + x_km / (km_per_degree() * std::cos(lat0 * kRad));
    return {std::clamp(lat, -90.0, 90.0), wrap_longitude(lon)};
}

std::array<double, 2> SceneFrame::to_km(LatLon p) const noexcept
{
    const double y = (p.lat - lat0) * km_per_degree();
    const double x = wrap_longitude(p.lon - lon0) * km_per_degree() * std::cos(lat0 * kRad);
    return {x, y};
}

RainCellModel::RainCellModel(SynthConfig cfg, SceneFrame frame, std::vector<RainCell> cells, double t0)
    : cfg_(std::move(cfg)), frame_(frame), cells_(std::move(cells)), t0_(t0)
{
}

RainCellModel RainCellModel::draw(const SynthConfig& cfg, Rng& rng)
{
    cfg.validate();
    const double width_km = static_cast<double>(cfg.n_pix) * cfg.pixel_km;
    const double height_km = static_cast<double>(cfg.n_scan) * cfg.pixel_km;
    const double height_deg = height_km / km_per_degree();

    SceneFrame frame;
    frame.pixel_km = cfg.pixel_km;
    frame.lat0 = uniform(rng, cfg.lat_min, std::max(cfg.lat_min, cfg.lat_max - height_deg));
    frame.lon0 = uniform(rng, -180.0, 180.0);
    const double t0 = cfg.time_start + uniform(rng, 0.0, cfg.time_span);

    const auto n_cells = std::poisson_distribution<int>(cfg.cell_rate)(rng);
    std::lognormal_distribution<double> peak(cfg.peak_log_mu, cfg.peak_log_sigma);
    std::vector<RainCell> cells;
    cells.reserve(static_cast<std::size_t>(n_cells));
    for (int i = 0; i < n_cells; ++i) {
        RainCell c;
        c.x_km = uniform(rng, 0.0, width_km);
        c.y_km = uniform(rng, 0.0, height_km);
        c.peak = peak(rng);
        const double r1 = uniform(rng, cfg.radius_min_km, cfg.radius_max_km);
        const double r2 = uniform(rng, cfg.radius_min_km, cfg.radius_max_km);
        c.sigma_major_km = std::max(r1, r2);
        c.sigma_minor_km = std::min(r1, r2);
        c.angle_rad = uniform(rng, 0.0, std::numbers::pi);
        cells.push_back(c);
    }
    return RainCellModel(cfg, frame, std::move(cells), t0);
}

double RainCellModel::rate_at_km(double x_km, double y_km) const noexcept
{
    const double f = cfg_.support_fraction;
    double total = 0.0;
    for (const auto& c : cells_) {
        const double dx = x_km - c.x_km;
        const double dy = y_km - c.y_km;
        const double ca = std::cos(c.angle_rad);
        const double sa = std::sin(c.angle_rad);
        const double u = (ca * dx + sa * dy) / c.sigma_major_km;
        const double v = (-sa * dx + ca * dy) / c.sigma_minor_km;
        const double g = std::exp(-0.5 * (u * u + v * v));
        if (g > f) {
            total += c.peak * (g - f) / (1.0 - f);
        }
    }
    return std::max(total, 0.0);
}

Geolocation RainCellModel::geolocation() const
{
    const std::size_t n = cfg_.n_scan * cfg_.n_pix;
    std::vector<float> lat(n);
    std::vector<float> lon(n);
    std::vector<double> times(cfg_.n_scan);
    for (std::size_t s = 0; s < cfg_.n_scan; ++s) {
        times[s] = t0_ + static_cast<double>(s) * cfg_.scan_period_s;
        for (std::size_t p = 0; p < cfg_.n_pix; ++p) {
            const auto ll = frame_.to_latlon(static_cast<double>(p) * cfg_.pixel_km,
                                             static_cast<double>(s) * cfg_.pixel_km);
            lat[s * cfg_.n_pix + p] = static_cast<float>(ll.lat);
            lon[s * cfg_.n_pix + p] = to_f32_lon(ll.lon);
        }
    }
    return Geolocation(cfg_.n_scan, cfg_.n_pix, std::move(lat), std::move(lon), std::move(times));
}

RainField RainCellModel::rasterize() const
{
    std::vector<float> rate(cfg_.n_scan * cfg_.n_pix);
    for (std::size_t s = 0; s < cfg_.n_scan; ++s) {
        for (std::size_t p = 0; p < cfg_.n_pix; ++p) {
            rate[s * cfg_.n_pix + p] = static_cast<float>(
                rate_at_km(static_cast<double>(p) * cfg_.pixel_km, static_cast<double>(s) * cfg_.pixel_km));
        }
    }
    return RainField(geolocation(), std::move(rate), Provenance::Reference);
}

std::vector<colocation::PointSample> RainCellModel::radar_samples(Rng& rng) const
{
    const double step = cfg_.radar_spacing_km;
    const double margin = cfg_.colocation_radius_km + step;
    const double x_hi = static_cast<double>(cfg_.n_pix - 1) * cfg_.pixel_km + margin;
    const double y_hi = static_cast<double>(cfg_.n_scan - 1) * cfg_.pixel_km + margin;
    const double phase_x = uniform(rng, 0.0, step);
    const double phase_y = uniform(rng, 0.0, step);
    const double jitter = 0.1 * step;

    std::vector<colocation::PointSample> out;
    for (double y = -margin + phase_y; y <= y_hi; y += step) {
        for (double x = -margin + phase_x; x <= x_hi; x += step) {
            const double xs = x + uniform(rng, -jitter, jitter);
            const double ys = y + uniform(rng, -jitter, jitter);
            const auto ll = frame_.to_latlon(xs, ys);
            out.push_back({ll.lat, ll.lon, rate_at_km(xs, ys), t0_ + ys / cfg_.pixel_km * cfg_.scan_period_s});
        }
    }
    return out;
}

RainField synth_rain(const SynthConfig& cfg, Rng& rng)
{
    return RainCellModel::draw(cfg, rng).rasterize();
}

TbScene synth_tb(const RainField& rain, const SurfaceMask& mask, const SynthConfig& cfg, Rng& rng,
                 std::string granule_id)
{
    cfg.validate();
    const auto& geo = rain.geo();
    const std::size_t n = geo.size();
    std::vector<float> tb(kTbChannels * n);
    std::normal_distribution<double> unit(0.0, 1.0);
    for (std::size_t c = 0; c < kTbChannels; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            const double r = rain.values()[i];
            if (std::isnan(r)) {
                tb[c * n + i] = std::numeric_limits<float>::quiet_NaN();
                continue;
            }
            const bool land = mask.lookup(geo.at(i)) == SurfaceClass::Land;
            const double offset = land ? cfg.land_offset[c] : cfg.ocean_offset[c];
            double value = cfg.tb0[c] + offset - cfg.depression[c] * std::pow(r, cfg.exponent[c]);
            if (cfg.noise_k[c] > 0.0) {
                value += cfg.noise_k[c] * unit(rng);
            }
            tb[c * n + i] = static_cast<float>(std::clamp(value, static_cast<double>(kTbMin),
                                                          static_cast<double>(kTbMax)));
        }
    }
    return TbScene(std::move(granule_id), geo, std::move(tb));
}

double invert_tb(double tb, double offset, std::size_t channel, const SynthConfig& cfg) noexcept
{
    const double depth = cfg.tb0[channel] + offset - tb;
    if (!(depth > 0.0)) {
        return 0.0;
    }
    return std::pow(depth / cfg.depression[channel], 1.0 / cfg.exponent[channel]);
}

RainField pixelwise_estimate(const TbScene& scene, const SynthConfig& cfg)
{
    constexpr auto ch = static_cast<std::size_t>(Channel::V89);
    const auto plane = scene.plane(Channel::V89);
    std::vector<float> rate(plane.size());
    for (std::size_t i = 0; i < plane.size(); ++i) {
        rate[i] = std::isnan(plane[i]) ? std::numeric_limits<float>::quiet_NaN()
                                       : static_cast<float>(invert_tb(plane[i], cfg.ocean_offset[ch], ch, cfg));
    }
    return RainField(scene.geo(), std::move(rate), Provenance::ExternalEstimator);
}

SynthScene synth_scene(const SynthConfig& cfg, const SurfaceMask& mask, std::uint64_t index)
{
    Rng rng(cfg.seed ^ index);
    auto model = RainCellModel::draw(cfg, rng);
    auto truth = model.rasterize();
    const auto radar = model.radar_samples(rng);
    auto reference = colocation::colocate_radius_mean(radar, truth.geo(), cfg.colocation_radius_km);
    char id[32];
    std::snprintf(id, sizeof(id), "scene_%06llu", static_cast<unsigned long long>(index));
    auto tb = synth_tb(truth, mask, cfg, rng, id);
    return SynthScene{std::move(model), std::move(truth), std::move(reference), std::move(tb)};
}

SurfaceMask synth_surface_mask(double cell_deg, std::uint64_t seed)
{
    Rng rng(seed);
    struct Blob {
        LatLon center;
        double radius_km;
    };
    std::vector<Blob> blobs;
    constexpr int kBlobs = 14;
    for (int i = 0; i < kBlobs; ++i) {
        const double lat = std::asin(uniform(rng, -1.0, 1.0)) / kRad;
        const double lon = uniform(rng, -180.0, 180.0);
        const double radius_deg = uniform(rng, 10.0, 30.0);
        blobs.push_back({{lat, lon}, radius_deg * km_per_degree()});
    }
    const auto base = SurfaceMask::uniform(SurfaceClass::Ocean, cell_deg);
    std::vector<std::uint8_t> classes(base.rows() * base.cols(), 0);
    for (std::size_t r = 0; r < base.rows(); ++r) {
        for (std::size_t c = 0; c < base.cols(); ++c) {
            const LatLon p{std::min(-90.0 + (static_cast<double>(r) + 0.5) * cell_deg, 90.0),
                           -180.0 + (static_cast<double>(c) + 0.5) * cell_deg};
            for (const auto& b : blobs) {
                if (haversine_km(p, b.center) <= b.radius_km) {
                    classes[r * base.cols() + c] = 1;
                    break;
                }
            }
        }
    }
    return SurfaceMask(base.rows(), base.cols(), base.origin_lat(), base.origin_lon(), cell_deg,
                       std::move(classes));
}

std::vector<colocation::MosaicFrame> synth_mosaic_frames(const RainCellModel& model, double cell_deg,
                                                         std::span<const double> times, Rng& rng)
{
    if (!(cell_deg > 0.0)) {
        throw UsageError("mosaic cell size must be positive");
    }
    const auto geo = model.geolocation();
    double lat_lo = 90.0, lat_hi = -90.0, lon_lo = 180.0, lon_hi = -180.0;
    for (std::size_t i = 0; i < geo.size(); ++i) {
        lat_lo = std::min<double>(lat_lo, geo.lat()[i]);
        lat_hi = std::max<double>(lat_hi, geo.lat()[i]);
        lon_lo = std::min<double>(lon_lo, geo.lon()[i]);
        lon_hi = std::max<double>(lon_hi, geo.lon()[i]);
    }
    if (lon_hi - lon_lo > 30.0) {
        throw DataError("scene straddles the antimeridian; no mosaic grid");
    }
    const double pad = 0.1;
    lat_lo = std::max(lat_lo - pad, -90.0);
    lat_hi = std::min(lat_hi + pad, 90.0);
    lon_lo = std::max(lon_lo - pad, -180.0);
    lon_hi = std::min(lon_hi + pad, 180.0 - cell_deg);

    colocation::MosaicFrame proto;
    proto.rows = static_cast<std::size_t>(std::ceil((lat_hi - lat_lo) / cell_deg));
    proto.cols = static_cast<std::size_t>(std::ceil((lon_hi - lon_lo) / cell_deg));
    proto.origin_lat = lat_lo;
    proto.origin_lon = lon_lo;
    proto.cell_deg = cell_deg;
    proto.accumulation.resize(proto.rows * proto.cols);
    proto.quality.assign(proto.rows * proto.cols, 100);

    // Low-quality patch, e.g. beam blockage over terrain.
    const LatLon bad_center{uniform(rng, lat_lo, lat_hi), uniform(rng, lon_lo, lon_hi)};
    const double bad_radius_km = uniform(rng, 10.0, 40.0);
    for (std::size_t r = 0; r < proto.rows; ++r) {
        for (std::size_t c = 0; c < proto.cols; ++c) {
            const auto center = proto.cell_center(r, c);
            const auto i = r * proto.cols + c;
            proto.accumulation[i] = static_cast<float>(model.rate_at(center) / colocation::kAccumulationToRate);
            if (haversine_km(center, bad_center) <= bad_radius_km) {
                proto.quality[i] = static_cast<std::uint8_t>(std::uniform_int_distribution<int>(30, 79)(rng));
            }
        }
    }
    std::vector<colocation::MosaicFrame> frames;
    for (double t : times) {
        auto f = proto;
        f.time = t;
        frames.push_back(std::move(f));
    }
    return frames;
}

}  // namespace drain::dataset
