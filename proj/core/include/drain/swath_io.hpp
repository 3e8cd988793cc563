#pragma once

// SWT1 swath container:
//   "SWT1" | u32 n_scan | u32 n_pix | u32 n_chan | u8 kind
//   | n_chan x f32 plane (scan-major) | f32 lat plane | f32 lon plane
//   | n_scan x f64 scan time
// All integers and floats little-endian.
//
// kind 2 carries any per-pixel channel stack: 99 quantile planes from a
// retrieval, 2 planes (lower, upper) for a confidence band, or one density
// plane per histogram bin.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "drain/swath.hpp"

namespace drain {

enum class SwathKind : std::uint8_t { Tb = 0, Rain = 1, Quantile = 2 };

struct SwathContainer {
    SwathKind kind = SwathKind::Tb;
    std::uint32_t n_chan = 0;
    Geolocation geo;
    std::vector<float> planes;
};

std::vector<unsigned char> encode_swath(const SwathContainer& c);
SwathContainer decode_swath(std::vector<unsigned char> bytes, const std::string& origin = "<memory>");

void write_swath_container(const std::filesystem::path& path, const SwathContainer& c);
SwathContainer read_swath_container(const std::filesystem::path& path);

// The granule id of a TbScene is not stored in the container; it is the
// file stem on read.
void write_swath(const std::filesystem::path& path, const TbScene& scene);
void write_swath(const std::filesystem::path& path, const RainField& field);
void write_swath(const std::filesystem::path& path, const QuantileField& field);

TbScene read_tb_scene(const std::filesystem::path& path);
RainField read_rain_field(const std::filesystem::path& path, Provenance provenance = Provenance::Reference);
QuantileField read_quantile_field(const std::filesystem::path& path);

}  // namespace drain
