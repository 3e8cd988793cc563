#include "drain/matched.hpp"

#include "drain/errors.hpp"

namespace drain::eval {

namespace {

template <typename T>
void append_span(std::vector<T>& dst, std::span<const T> src)
{
    dst.insert(dst.end(), src.begin(), src.end());
}

template <typename T>
std::vector<T> pick(const std::vector<T>& src, std::span<const std::size_t> idx)
{
    if (src.empty()) {
        return {};
    }
    std::vector<T> out;
    out.reserve(idx.size());
    for (const auto i : idx) {
        out.push_back(src[i]);
    }
    return out;
}

void append_pair(MatchedPixels& px, const RainField& ref_field, const RainField& est_field)
{
    if (!ref_field.geo().same_grid(est_field.geo())) {
        throw UsageError("reference and estimate are on different grids");
    }
    const auto& geo = ref_field.geo();
    append_span(px.ref, ref_field.values());
    append_span(px.est, est_field.values());
    append_span(px.lat, geo.lat());
    append_span(px.lon, geo.lon());
    for (std::size_t s = 0; s < geo.n_scan(); ++s) {
        px.time.insert(px.time.end(), geo.n_pix(), geo.scan_time()[s]);
    }
}

}  // namespace

void MatchedPixels::append(const RainField& ref_field, const RainField& est_field)
{
    if (!lo50.empty()) {
        throw UsageError("cannot mix scenes with and without confidence bands");
    }
    append_pair(*this, ref_field, est_field);
}

void MatchedPixels::append(const RainField& ref_field, const QuantileField& qf)
{
    if (size() > 0 && lo50.empty()) {
        throw UsageError("cannot mix scenes with and without confidence bands");
    }
    const auto b50 = quantiles::confidence_band(qf, 0.5);
    const auto b90 = quantiles::confidence_band(qf, 0.9);
    append_pair(*this, ref_field, quantiles::point_estimate(qf, 0.5));
    append_span(lo50, b50.lower.values());
    append_span(hi50, b50.upper.values());
    append_span(lo90, b90.lower.values());
    append_span(hi90, b90.upper.values());
}

MatchedPixels MatchedPixels::subset(std::span<const std::size_t> indices) const
{
    MatchedPixels out;
    out.ref = pick(ref, indices);
    out.est = pick(est, indices);
    out.lat = pick(lat, indices);
    out.lon = pick(lon, indices);
    out.time = pick(time, indices);
    out.lo50 = pick(lo50, indices);
    out.hi50 = pick(hi50, indices);
    out.lo90 = pick(lo90, indices);
    out.hi90 = pick(hi90, indices);
    return out;
}

const char* to_string(Stratum s) noexcept
{
    switch (s) {
    case Stratum::Land: return "LAND";
    case Stratum::Ocean: return "OCEAN";
    case Stratum::Total: return "TOTAL";
    }
    return "?";
}

std::array<std::vector<std::size_t>, 2> surface_partition(const MatchedPixels& px, const SurfaceMask& mask)
{
    std::array<std::vector<std::size_t>, 2> out;
    for (std::size_t i = 0; i < px.size(); ++i) {
        const bool land = mask_lookup(mask, px.lat[i], px.lon[i]) == SurfaceClass::Land;
        out[land ? 0 : 1].push_back(i);
    }
    return out;
}

}  // namespace drain::eval
