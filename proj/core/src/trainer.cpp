#include "drain/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "drain/errors.hpp"
#include "drain/pinball.hpp"

namespace drain::qunet {

void TrainConfig::validate() const
{
    if (!(adam.learning_rate > 0.0)) {
        throw UsageError("train.learning_rate must be > 0");
    }
    if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
        throw UsageError("train.beta1 and train.beta2 must be in [0, 1)");
    }
    if (!(adam.epsilon > 0.0)) {
        throw UsageError("train.epsilon must be > 0");
    }
    if (batch_size == 0) {
        throw UsageError("train.batch_size must be >= 1");
    }
}

TrainState initial_state(const ModelConfig& cfg)
{
    UNet<float> model(cfg);
    AdamState<float> adam(model.parameter_count());
    return {std::move(model), std::move(adam), {}};
}

Tensor<float> stack_inputs(std::span<const dataset::NormalizedTile* const> tiles)
{
    if (tiles.empty()) {
        throw UsageError("empty batch");
    }
    const std::size_t h = tiles[0]->n_scan, w = tiles[0]->n_pix, hw = h * w, B = tiles.size();
    Tensor<float> x(kTbChannels, B, h, w);
    for (std::size_t b = 0; b < B; ++b) {
        const auto& t = *tiles[b];
        if (t.n_scan != h || t.n_pix != w || t.planes.size() != kTbChannels * hw) {
            throw DataError("batch tiles differ in shape");
        }
        for (std::size_t c = 0; c < kTbChannels; ++c) {
            const float* src = t.planes.data() + c * hw;
            float* dst = x.data.data() + (c * B + b) * hw;
            for (std::size_t i = 0; i < hw; ++i) {
                dst[i] = std::isnan(src[i]) ? 0.0f : src[i];
            }
        }
    }
    return x;
}

namespace {

struct Batch {
    std::vector<const Sample*> samples;
};

// Consecutive runs of the given order, at most batch_size long, split further
// so that every batch holds a single tile shape.
std::vector<Batch> make_batches(std::span<const Sample> set, const std::vector<std::size_t>& order,
                                std::size_t batch_size)
{
    std::vector<Batch> out;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
        const std::size_t stop = std::min(order.size(), start + batch_size);
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> slot;
        for (std::size_t k = start; k < stop; ++k) {
            const Sample& s = set[order[k]];
            const auto key = std::make_pair(s.input.n_scan, s.input.n_pix);
            auto it = slot.find(key);
            if (it == slot.end()) {
                it = slot.emplace(key, out.size()).first;
                out.emplace_back();
            }
            out[it->second].samples.push_back(&s);
        }
    }
    return out;
}

std::vector<float> stack_targets(const Batch& batch)
{
    std::vector<float> y;
    for (const Sample* s : batch.samples) {
        if (s->target.size() != s->input.n_scan * s->input.n_pix) {
            throw DataError("target plane does not match its input tile");
        }
        y.insert(y.end(), s->target.begin(), s->target.end());
    }
    return y;
}

Tensor<float> batch_inputs(const Batch& batch)
{
    std::vector<const dataset::NormalizedTile*> tiles;
    tiles.reserve(batch.samples.size());
    for (const Sample* s : batch.samples) {
        tiles.push_back(&s->input);
    }
    return stack_inputs(tiles);
}

std::uint64_t epoch_seed(std::uint64_t seed, std::size_t epoch)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(epoch)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

}  // namespace

double evaluate_loss(const UNet<float>& model, std::span<const Sample> samples, std::size_t batch_size)
{
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto levels = quantile_levels(model.config().out_channels);
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& batch : make_batches(samples, order, std::max<std::size_t>(batch_size, 1))) {
        const auto y = stack_targets(batch);
        const std::size_t valid = valid_target_count(y);
        if (valid == 0) {
            continue;
        }
        const auto out = model.forward(batch_inputs(batch));
        sum += pinball_accumulate<float>(out.data, y, levels, 1.0, {});
        n += valid;
    }
    if (n == 0) {
        throw DataError("no valid target pixels to evaluate");
    }
    return sum / static_cast<double>(n);
}

TrainState train(TrainState state, const TrainConfig& cfg, std::span<const Sample> train_set,
                 std::span<const Sample> val_set, const EpochCallback& on_epoch)
{
    cfg.validate();
    if (train_set.empty() && cfg.epochs > state.history.size()) {
        throw DataError("training split is empty");
    }
    auto& model = state.model;
    const auto levels = quantile_levels(model.config().out_channels);
    if (state.adam.m.size() != model.parameter_count()) {
        state.adam = AdamState<float>(model.parameter_count());
    }
    std::vector<float> grads(model.parameter_count());
    UNet<float>::Tape tape;

    for (std::size_t epoch = state.history.size() + 1; epoch <= cfg.epochs; ++epoch) {
        std::vector<std::size_t> order(train_set.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::mt19937_64 rng(epoch_seed(cfg.seed, epoch));
        std::shuffle(order.begin(), order.end(), rng);

        double loss_sum = 0.0;
        std::size_t loss_n = 0;
        std::size_t batch_index = 0;
        for (const auto& batch : make_batches(train_set, order, cfg.batch_size)) {
            ++batch_index;
            const auto y = stack_targets(batch);
            const std::size_t valid = valid_target_count(y);
            if (valid == 0) {
                continue;
            }
            const auto& out = model.forward(batch_inputs(batch), tape);
            Tensor<float> g(out.c, out.b, out.h, out.w);
            const double sum = pinball_accumulate<float>(out.data, y, levels, 1.0 / static_cast<double>(valid),
                                                         g.data);
            if (!std::isfinite(sum)) {
                throw NumericalError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                     std::to_string(batch_index) +
                                     "; lower the learning rate or check the inputs");
            }
            loss_sum += sum;
            loss_n += valid;
            std::fill(grads.begin(), grads.end(), 0.0f);
            model.backward(tape, g, grads);
            adam_step<float>(model.params(), grads, state.adam, cfg.adam);
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_n > 0 ? loss_sum / static_cast<double>(loss_n)
                                    : std::numeric_limits<double>::quiet_NaN();
        rec.val_loss = val_set.empty() ? std::numeric_limits<double>::quiet_NaN()
                                       : evaluate_loss(model, val_set, cfg.batch_size);
        if (!val_set.empty() && !std::isfinite(rec.val_loss)) {
            throw NumericalError("non-finite validation loss at epoch " + std::to_string(epoch));
        }
        state.history.push_back(rec);
        if (on_epoch) {
            on_epoch(state);
        }
    }
    return state;
}

QuantileField predict(const UNet<float>& model, const dataset::NormalizedTile& tile, const Geolocation& geo)
{
    if (geo.n_scan() != tile.n_scan || geo.n_pix() != tile.n_pix) {
        throw DataError("geolocation does not match the input tile");
    }
    const dataset::NormalizedTile* one[1] = {&tile};
    auto out = model.forward(stack_inputs(one));
    return QuantileField(geo, std::move(out.data), model.config().out_channels);
}

}  // namespace drain::qunet
