#pragma once

// Mini-batch Adam training of the quantile U-Net on whole tiles.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "drain/adam.hpp"
#include "drain/normalizer.hpp"
#include "drain/swath.hpp"
#include "drain/unet.hpp"

namespace drain::qunet {

struct TrainConfig {
    AdamConfig adam;
    std::size_t epochs = 50;
    std::size_t batch_size = 8;
    std::uint64_t seed = 7;

    void validate() const;
};

/// One training example: standardized inputs and the reference rain (NaN = unknown).
struct Sample {
    dataset::NormalizedTile input;
    std::vector<float> target;
};

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;  // NaN without a validation split
};

/// Everything needed to continue training bit-for-bit.
struct TrainState {
    UNet<float> model;
    AdamState<float> adam;
    std::vector<EpochRecord> history;
};

TrainState initial_state(const ModelConfig& cfg);

using EpochCallback = std::function<void(const TrainState&)>;

/// Runs epochs history.size()+1 .. cfg.epochs. Each epoch shuffles the
/// training set with an rng derived from (seed, epoch), so a resumed run
/// matches an uninterrupted one. Throws NumericalError on a non-finite loss.
TrainState train(TrainState state, const TrainConfig& cfg, std::span<const Sample> train_set,
                 std::span<const Sample> val_set, const EpochCallback& on_epoch = {});

/// Mean pinball loss over all valid target pixels of `samples`.
double evaluate_loss(const UNet<float>& model, std::span<const Sample> samples, std::size_t batch_size = 8);

/// Stacks tiles into a [4][B][H][W] tensor; NaN inputs become 0 (the training mean).
Tensor<float> stack_inputs(std::span<const dataset::NormalizedTile* const> tiles);

/// Raw network quantiles for one tile, as a QuantileField on `geo`.
QuantileField predict(const UNet<float>& model, const dataset::NormalizedTile& tile, const Geolocation& geo);

}  // namespace drain::qunet
