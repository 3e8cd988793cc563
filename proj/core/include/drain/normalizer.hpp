#pragma once

#include <array>
#include <span>
#include <vector>

#include "drain/swath.hpp"

namespace drain::dataset {

/// Four standardized input planes, same layout as TbScene::values().
struct NormalizedTile {
    std::size_t n_scan = 0;
    std::size_t n_pix = 0;
    std::vector<float> planes;
};

/// Per-channel mean and (population) standard deviation in kelvin, fitted
/// on the training split only.
struct Normalizer {
    std::array<double, kTbChannels> mean{};
    std::array<double, kTbChannels> stddev{};

    /// NaN inputs stay NaN.
    NormalizedTile apply(const TbScene& scene) const;
    std::vector<float> apply(std::span<const float> planes) const;
};

/// Each entry is a 4-plane stack. Needs at least two stacks; throws
/// DataError on a zero-variance channel.
Normalizer fit_normalizer(std::span<const std::span<const float>> stacks);
Normalizer fit_normalizer(std::span<const TbScene> scenes);

inline NormalizedTile apply_normalizer(const Normalizer& n, const TbScene& scene) { return n.apply(scene); }

}  // namespace drain::dataset
