#include "drain/swath_io.hpp"

#include <limits>

#include "binary_io.hpp"
#include "drain/errors.hpp"

namespace drain {

namespace {

std::uint32_t checked_u32(std::size_t n, const char* what)
{
    if (n > std::numeric_limits<std::uint32_t>::max()) {
        throw UsageError(std::string(what) + " exceeds the u32 range of the SWT1 header");
    }
    return static_cast<std::uint32_t>(n);
}

std::uint32_t expected_channels(SwathKind kind)
{
    switch (kind) {
    case SwathKind::Tb: return static_cast<std::uint32_t>(kTbChannels);
    case SwathKind::Rain: return 1;
    case SwathKind::Quantile: return 0;  // any
    }
    return 0;
}

}  // namespace

std::vector<unsigned char> encode_swath(const SwathContainer& c)
{
    const auto& geo = c.geo;
    if (c.planes.size() != static_cast<std::size_t>(c.n_chan) * geo.size()) {
        throw FormatError(FormatErrorKind::DimensionMismatch, "planes do not match n_chan x n_scan x n_pix");
    }
    detail::ByteWriter w;
    w.magic("SWT1");
    w.put(checked_u32(geo.n_scan(), "n_scan"));
    w.put(checked_u32(geo.n_pix(), "n_pix"));
    w.put(c.n_chan);
    w.put(static_cast<std::uint8_t>(c.kind));
    w.put_all<float>(c.planes);
    w.put_all<float>(geo.lat());
    w.put_all<float>(geo.lon());
    w.put_all<double>(geo.scan_time());
    return w.bytes();
}

SwathContainer decode_swath(std::vector<unsigned char> bytes, const std::string& origin)
{
    detail::ByteReader r(std::move(bytes), origin);
    r.expect_magic("SWT1");
    const auto n_scan = r.get<std::uint32_t>();
    const auto n_pix = r.get<std::uint32_t>();
    const auto n_chan = r.get<std::uint32_t>();
    const auto kind_byte = r.get<std::uint8_t>();
    if (kind_byte > 2) {
        throw FormatError(FormatErrorKind::DimensionMismatch, origin + ": unknown kind " + std::to_string(kind_byte));
    }
    const auto kind = static_cast<SwathKind>(kind_byte);
    if (n_scan == 0 || n_pix == 0 || n_chan == 0) {
        throw FormatError(FormatErrorKind::DimensionMismatch, origin + ": zero dimension in header");
    }
    if (const auto want = expected_channels(kind); want != 0 && want != n_chan) {
        throw FormatError(FormatErrorKind::DimensionMismatch,
                          origin + ": kind " + std::to_string(kind_byte) + " requires " + std::to_string(want) +
                              " channels, header says " + std::to_string(n_chan));
    }
    const std::size_t plane = static_cast<std::size_t>(n_scan) * n_pix;
    SwathContainer c;
    c.kind = kind;
    c.n_chan = n_chan;
    c.planes = r.get_all<float>(plane * n_chan);
    auto lat = r.get_all<float>(plane);
    auto lon = r.get_all<float>(plane);
    auto times = r.get_all<double>(n_scan);
    r.expect_end();
    c.geo = Geolocation(n_scan, n_pix, std::move(lat), std::move(lon), std::move(times));
    return c;
}

void write_swath_container(const std::filesystem::path& path, const SwathContainer& c)
{
    detail::ByteWriter w;
    w.raw(encode_swath(c));
    w.save(path);
}

SwathContainer read_swath_container(const std::filesystem::path& path)
{
    auto reader = detail::ByteReader::from_file(path);
    auto all = reader.get_all<unsigned char>(reader.remaining());
    return decode_swath(std::move(all), path.string());
}

void write_swath(const std::filesystem::path& path, const TbScene& scene)
{
    write_swath_container(path, SwathContainer{SwathKind::Tb, static_cast<std::uint32_t>(kTbChannels), scene.geo(),
                                               {scene.values().begin(), scene.values().end()}});
}

void write_swath(const std::filesystem::path& path, const RainField& field)
{
    write_swath_container(path,
                          SwathContainer{SwathKind::Rain, 1, field.geo(), {field.values().begin(), field.values().end()}});
}

void write_swath(const std::filesystem::path& path, const QuantileField& field)
{
    write_swath_container(path, SwathContainer{SwathKind::Quantile, static_cast<std::uint32_t>(field.n_levels()),
                                               field.geo(), {field.values().begin(), field.values().end()}});
}

namespace {

SwathContainer read_expecting(const std::filesystem::path& path, SwathKind kind)
{
    auto c = read_swath_container(path);
    if (c.kind != kind) {
        throw FormatError(FormatErrorKind::DimensionMismatch,
                          path.string() + ": unexpected kind " + std::to_string(static_cast<int>(c.kind)));
    }
    return c;
}

}  // namespace

TbScene read_tb_scene(const std::filesystem::path& path)
{
    auto c = read_expecting(path, SwathKind::Tb);
    return TbScene(path.stem().string(), std::move(c.geo), std::move(c.planes));
}

RainField read_rain_field(const std::filesystem::path& path, Provenance provenance)
{
    auto c = read_expecting(path, SwathKind::Rain);
    return RainField(std::move(c.geo), std::move(c.planes), provenance);
}

QuantileField read_quantile_field(const std::filesystem::path& path)
{
    auto c = read_expecting(path, SwathKind::Quantile);
    const std::size_t levels = c.n_chan;
    return QuantileField(std::move(c.geo), std::move(c.planes), levels);
}

}  // namespace drain
