#include "drain/swath.hpp"

#include <cmath>
#include <utility>

#include "drain/errors.hpp"

namespace drain {

namespace {

std::vector<float> crop_planes(std::span<const float> src, std::size_t n_planes, const Geolocation& from,
                               std::size_t n_scan, std::size_t n_pix)
{
    std::vector<float> out;
    out.reserve(n_planes * n_scan * n_pix);
    const std::size_t plane_size = from.size();
    for (std::size_t c = 0; c < n_planes; ++c) {
        for (std::size_t s = 0; s < n_scan; ++s) {
            const auto row = src.subspan(c * plane_size + from.index(s, 0), n_pix);
            out.insert(out.end(), row.begin(), row.end());
        }
    }
    return out;
}

}  // namespace

const char* channel_name(Channel c) noexcept
{
    switch (c) {
    case Channel::V37: return "37V";
    case Channel::H37: return "37H";
    case Channel::V89: return "89V";
    case Channel::H89: return "89H";
    }
    return "?";
}

const char* to_string(Provenance p) noexcept
{
    switch (p) {
    case Provenance::Reference: return "reference";
    case Provenance::Retrieval: return "retrieval";
    case Provenance::ExternalEstimator: return "external-estimator";
    }
    return "?";
}

Geolocation::Geolocation(std::size_t n_scan, std::size_t n_pix, std::vector<float> lat, std::vector<float> lon,
                         std::vector<double> scan_time)
    : n_scan_(n_scan), n_pix_(n_pix), lat_(std::move(lat)), lon_(std::move(lon)), scan_time_(std::move(scan_time))
{
    if (n_scan_ < 1 || n_pix_ < 1) {
        throw DataError("geolocation needs n_scan >= 1 and n_pix >= 1");
    }
    if (lat_.size() != size() || lon_.size() != size() || scan_time_.size() != n_scan_) {
        throw DataError("geolocation plane sizes do not match n_scan x n_pix");
    }
    for (std::size_t i = 0; i < size(); ++i) {
        if (!valid_latlon(at(i))) {
            throw DataError("geolocation out of range at pixel " + std::to_string(i));
        }
    }
}

Geolocation Geolocation::cropped(std::size_t n_scan, std::size_t n_pix) const
{
    if (n_scan > n_scan_ || n_pix > n_pix_) {
        throw DataError("crop larger than source grid");
    }
    auto lat = crop_planes(lat_, 1, *this, n_scan, n_pix);
    auto lon = crop_planes(lon_, 1, *this, n_scan, n_pix);
    std::vector<double> times(scan_time_.begin(), scan_time_.begin() + static_cast<std::ptrdiff_t>(n_scan));
    return Geolocation(n_scan, n_pix, std::move(lat), std::move(lon), std::move(times));
}

bool Geolocation::same_grid(const Geolocation& other) const noexcept
{
    return n_scan_ == other.n_scan_ && n_pix_ == other.n_pix_ && lat_ == other.lat_ && lon_ == other.lon_;
}

TbScene::TbScene(std::string granule_id, Geolocation geo, std::vector<float> tb)
    : granule_id_(std::move(granule_id)), geo_(std::move(geo)), tb_(std::move(tb))
{
    if (tb_.size() != kTbChannels * geo_.size()) {
        throw DataError("TB planes do not match 4 x n_scan x n_pix");
    }
    for (float v : tb_) {
        if (std::isnan(v)) {
            continue;
        }
        if (!(v >= kTbMin && v <= kTbMax)) {
            throw DataError("brightness temperature outside [50, 350] K: " + std::to_string(v));
        }
    }
}

std::span<const float> TbScene::plane(Channel c) const noexcept
{
    return std::span<const float>(tb_).subspan(static_cast<std::size_t>(c) * geo_.size(), geo_.size());
}

RainField::RainField(Geolocation geo, std::vector<float> rate, Provenance provenance)
    : geo_(std::move(geo)), rate_(std::move(rate)), provenance_(provenance)
{
    if (rate_.size() != geo_.size()) {
        throw DataError("rain plane does not match n_scan x n_pix");
    }
    for (float v : rate_) {
        if (!std::isnan(v) && !(v >= 0.0f)) {
            throw DataError("negative rain rate: " + std::to_string(v));
        }
    }
}

QuantileField::QuantileField(Geolocation geo, std::vector<float> values, std::size_t n_levels)
    : geo_(std::move(geo)), values_(std::move(values)), n_levels_(n_levels)
{
    if (n_levels_ < 1) {
        throw DataError("quantile field needs at least one level");
    }
    if (values_.size() != n_levels_ * geo_.size()) {
        throw DataError("quantile planes do not match n_levels x n_scan x n_pix");
    }
}

std::span<const float> QuantileField::plane(std::size_t j) const noexcept
{
    return std::span<const float>(values_).subspan(j * geo_.size(), geo_.size());
}

std::size_t tile_extent(std::size_t n, std::size_t multiple)
{
    if (multiple == 0) {
        throw UsageError("tile multiple must be positive");
    }
    if (n < multiple) {
        throw TileError("dimension " + std::to_string(n) + " is smaller than the tile multiple " +
                        std::to_string(multiple) + "; tile unusable");
    }
    return n - n % multiple;
}

TbScene crop_to_tile(const TbScene& scene, std::size_t multiple)
{
    const auto ns = tile_extent(scene.n_scan(), multiple);
    const auto np = tile_extent(scene.n_pix(), multiple);
    return TbScene(scene.granule_id(), scene.geo().cropped(ns, np),
                   crop_planes(scene.values(), kTbChannels, scene.geo(), ns, np));
}

RainField crop_to_tile(const RainField& field, std::size_t multiple)
{
    const auto ns = tile_extent(field.n_scan(), multiple);
    const auto np = tile_extent(field.n_pix(), multiple);
    return RainField(field.geo().cropped(ns, np), crop_planes(field.values(), 1, field.geo(), ns, np),
                     field.provenance());
}

QuantileField crop_to_tile(const QuantileField& field, std::size_t multiple)
{
    const auto ns = tile_extent(field.geo().n_scan(), multiple);
    const auto np = tile_extent(field.geo().n_pix(), multiple);
    return QuantileField(field.geo().cropped(ns, np),
                         crop_planes(field.values(), field.n_levels(), field.geo(), ns, np), field.n_levels());
}

}  // namespace drain
