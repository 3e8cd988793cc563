#include "drain/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "drain/errors.hpp"

namespace drain::dataset {

void SceneSelectionRule::validate() const
{
    if (!(light_thresh > 0.0) || !(heavy_thresh > 0.0) || light_count < 1 || heavy_count < 1) {
        throw UsageError("selection thresholds must be > 0 and counts >= 1");
    }
}

bool select_scene(const RainField& rain, const SceneSelectionRule& rule)
{
    rule.validate();
    std::size_t light = 0;
    std::size_t heavy = 0;
    for (float v : rain.values()) {
        // NaN compares false on both tests.
        light += static_cast<double>(v) > rule.light_thresh ? 1 : 0;
        heavy += static_cast<double>(v) > rule.heavy_thresh ? 1 : 0;
    }
    return light >= rule.light_count || heavy >= rule.heavy_count;
}

DatasetSplit split_dataset(std::size_t n_scenes, std::array<double, 3> fractions, std::uint64_t seed)
{
    if (n_scenes == 0) {
        throw DataError("cannot split an empty scene list");
    }
    for (double f : fractions) {
        if (!(f >= 0.0 && f <= 1.0)) {
            throw UsageError("split fractions must lie in [0, 1]");
        }
    }
    if (std::abs(fractions[0] + fractions[1] + fractions[2] - 1.0) > 1e-9) {
        throw UsageError("split fractions must sum to 1");
    }
    std::vector<std::size_t> order(n_scenes);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    const auto n = static_cast<double>(n_scenes);
    const auto n_train = std::min(n_scenes, static_cast<std::size_t>(std::llround(fractions[0] * n)));
    const auto n_val = std::min(n_scenes - n_train, static_cast<std::size_t>(std::llround(fractions[1] * n)));

    DatasetSplit out;
    const auto b = order.begin();
    out.train.assign(b, b + static_cast<std::ptrdiff_t>(n_train));
    out.val.assign(b + static_cast<std::ptrdiff_t>(n_train), b + static_cast<std::ptrdiff_t>(n_train + n_val));
    out.test.assign(b + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
    return out;
}

}  // namespace drain::dataset
