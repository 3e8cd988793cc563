#include "drain/normalizer.hpp"

#include <cmath>

#include "drain/errors.hpp"

namespace drain::dataset {

std::vector<float> Normalizer::apply(std::span<const float> planes) const
{
    if (planes.size() % kTbChannels != 0) {
        throw UsageError("plane stack is not a multiple of 4 channels");
    }
    const std::size_t n = planes.size() / kTbChannels;
    std::vector<float> out(planes.size());
    for (std::size_t c = 0; c < kTbChannels; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            const float v = planes[c * n + i];
            out[c * n + i] = static_cast<float>((static_cast<double>(v) - mean[c]) / stddev[c]);
        }
    }
    return out;
}

NormalizedTile Normalizer::apply(const TbScene& scene) const
{
    return {scene.n_scan(), scene.n_pix(), apply(scene.values())};
}

Normalizer fit_normalizer(std::span<const std::span<const float>> stacks)
{
    if (stacks.size() < 2) {
        throw DataError("normalizer needs at least two training scenes");
    }
    std::array<double, kTbChannels> sum{};
    std::array<double, kTbChannels> count{};
    for (const auto& stack : stacks) {
        const std::size_t n = stack.size() / kTbChannels;
        for (std::size_t c = 0; c < kTbChannels; ++c) {
            for (std::size_t i = 0; i < n; ++i) {
                const float v = stack[c * n + i];
                if (!std::isnan(v)) {
                    sum[c] += v;
                    count[c] += 1.0;
                }
            }
        }
    }
    Normalizer out;
    for (std::size_t c = 0; c < kTbChannels; ++c) {
        if (count[c] == 0.0) {
            throw DataError("normalizer: channel " + std::to_string(c) + " has no finite values");
        }
        out.mean[c] = sum[c] / count[c];
    }
    // Second pass for a numerically stable variance.
    std::array<double, kTbChannels> ss{};
    for (const auto& stack : stacks) {
        const std::size_t n = stack.size() / kTbChannels;
        for (std::size_t c = 0; c < kTbChannels; ++c) {
            for (std::size_t i = 0; i < n; ++i) {
                const float v = stack[c * n + i];
                if (!std::isnan(v)) {
                    const double d = v - out.mean[c];
                    ss[c] += d * d;
                }
            }
        }
    }
    for (std::size_t c = 0; c < kTbChannels; ++c) {
        out.stddev[c] = std::sqrt(ss[c] / count[c]);
        if (!(out.stddev[c] > 0.0)) {
            throw DataError(std::string("normalizer: zero variance in channel ") +
                            channel_name(static_cast<Channel>(c)));
        }
    }
    return out;
}

Normalizer fit_normalizer(std::span<const TbScene> scenes)
{
    std::vector<std::span<const float>> stacks;
    stacks.reserve(scenes.size());
    for (const auto& s : scenes) {
        stacks.push_back(s.values());
    }
    return fit_normalizer(std::span<const std::span<const float>>(stacks));
}

}  // namespace drain::dataset
