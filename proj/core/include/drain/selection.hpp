#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "drain/swath.hpp"

namespace drain::dataset {

/// A scene is kept when it has at least light_count pixels above
/// light_thresh or at least heavy_count pixels above heavy_thresh.
struct SceneSelectionRule {
    double light_thresh = 0.1;    // mm/hr
    std::size_t light_count = 100;
    double heavy_thresh = 100.0;  // mm/hr
    std::size_t heavy_count = 10;

    void validate() const;
};

/// NaN pixels count as no-rain.
bool select_scene(const RainField& rain, const SceneSelectionRule& rule = {});

struct DatasetSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;
};

/// Deterministic shuffle of indices 0..n-1 under `seed`, cut into
/// round(f_train*n), round(f_val*n) and the remainder.
DatasetSplit split_dataset(std::size_t n_scenes, std::array<double, 3> fractions, std::uint64_t seed);

}  // namespace drain::dataset
