#include "drain/colocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "drain/errors.hpp"

namespace drain::colocation {

namespace {

// Extra margin on the longitude window, in degrees.
constexpr double kLonSlackDeg = 1e-7;

}  // namespace

RadiusIndex::RadiusIndex(std::span<const PointSample> samples, double radius_km)
    : samples_(samples), radius_km_(radius_km)
{
    if (!(radius_km_ > 0.0)) {
        throw UsageError("co-location radius must be positive");
    }
    if (samples_.size() > std::numeric_limits<std::uint32_t>::max()) {
        throw UsageError("too many samples for a RadiusIndex");
    }
    bucket_deg_ = std::min(radius_km_ / km_per_degree(), 180.0);
    n_rows_ = static_cast<std::int64_t>(std::ceil(180.0 / bucket_deg_)) + 1;
    n_cols_ = static_cast<std::int64_t>(std::ceil(360.0 / bucket_deg_));
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const auto& s = samples_[i];
        if (std::isnan(s.value)) {
            continue;
        }
        buckets_[key(row_of(s.lat), col_of(s.lon))].push_back(static_cast<std::uint32_t>(i));
    }
}

std::int64_t RadiusIndex::row_of(double lat) const noexcept
{
    return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((lat + 90.0) / bucket_deg_)), 0,
                                    n_rows_ - 1);
}

std::int64_t RadiusIndex::col_of(double lon) const noexcept
{
    auto c = static_cast<std::int64_t>(std::floor((wrap_longitude(lon) + 180.0) / bucket_deg_));
    c %= n_cols_;
    return c < 0 ? c + n_cols_ : c;
}

std::uint64_t RadiusIndex::key(std::int64_t row, std::int64_t col) const noexcept
{
    return static_cast<std::uint64_t>(row) * static_cast<std::uint64_t>(n_cols_) + static_cast<std::uint64_t>(col);
}

std::vector<std::uint32_t> RadiusIndex::contributors(LatLon target) const
{
    constexpr double rad = std::numbers::pi / 180.0;
    const double ang = radius_km_ / kEarthRadiusKm;  // radians
    const double dlat_deg = ang / rad;

    const std::int64_t r0 = std::max<std::int64_t>(row_of(target.lat - dlat_deg) - 1, 0);
    const std::int64_t r1 = std::min<std::int64_t>(row_of(target.lat + dlat_deg) + 1, n_rows_ - 1);

    // Widest longitude offset of the spherical cap, evaluated at a latitude
    // at least as poleward as any point of the cap.
    const double phi_star = std::min(std::abs(target.lat) + dlat_deg, 90.0) * rad;
    const double s = std::sin(std::min(ang, std::numbers::pi / 2.0));
    bool full_ring = std::cos(phi_star) <= s || ang >= std::numbers::pi / 2.0;
    double dlon_deg = 180.0;
    if (!full_ring) {
        dlon_deg = std::asin(s / std::cos(phi_star)) / rad + kLonSlackDeg;
    }
    std::int64_t c_lo = 0;
    std::int64_t c_span = n_cols_;
    if (!full_ring) {
        c_lo = static_cast<std::int64_t>(std::floor((target.lon - dlon_deg + 180.0) / bucket_deg_)) - 1;
        const auto c_hi = static_cast<std::int64_t>(std::floor((target.lon + dlon_deg + 180.0) / bucket_deg_)) + 1;
        c_span = std::min(c_hi - c_lo + 1, n_cols_);
    }

    std::vector<std::uint32_t> out;
    for (std::int64_t r = r0; r <= r1; ++r) {
        for (std::int64_t k = 0; k < c_span; ++k) {
            std::int64_t c = (c_lo + k) % n_cols_;
            if (c < 0) {
                c += n_cols_;
            }
            const auto it = buckets_.find(key(r, c));
            if (it == buckets_.end()) {
                continue;
            }
            for (const auto idx : it->second) {
                const auto& smp = samples_[idx];
                if (haversine_km(target, {smp.lat, smp.lon}) <= radius_km_) {
                    out.push_back(idx);
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<std::uint32_t>> colocate_contributors(std::span<const PointSample> samples,
                                                              const Geolocation& targets, double radius_km)
{
    const RadiusIndex index(samples, radius_km);
    std::vector<std::vector<std::uint32_t>> out(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        out[i] = index.contributors(targets.at(i));
    }
    return out;
}

RainField colocate_radius_mean(std::span<const PointSample> samples, const Geolocation& targets, double radius_km,
                               Provenance provenance)
{
    const RadiusIndex index(samples, radius_km);
    std::vector<float> rate(targets.size(), std::numeric_limits<float>::quiet_NaN());
    std::vector<double> values;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto members = index.contributors(targets.at(i));
        if (members.empty()) {
            continue;
        }
        values.clear();
        for (const auto idx : members) {
            values.push_back(samples[idx].value);
        }
        std::sort(values.begin(), values.end());
        double sum = 0.0;
        for (double v : values) {
            sum += v;
        }
        rate[i] = static_cast<float>(sum / static_cast<double>(values.size()));
    }
    return RainField(targets, std::move(rate), provenance);
}

std::size_t overpass_coverage(const Geolocation& geo, const LatLonBox& box) noexcept
{
    std::size_t n = 0;
    for (std::size_t i = 0; i < geo.size(); ++i) {
        n += box.contains(geo.at(i)) ? 1 : 0;
    }
    return n;
}

double overpass_mid_time(const Geolocation& geo) noexcept
{
    const auto t = geo.scan_time();
    return 0.5 * (t.front() + t.back());
}

}  // namespace drain::colocation
