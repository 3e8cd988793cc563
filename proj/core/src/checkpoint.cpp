#include "drain/checkpoint.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "binary_io.hpp"
#include "drain/errors.hpp"

namespace drain::qunet {

namespace {

using nlohmann::json;

constexpr int kVersion = 1;

json number_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

double number_or_nan(const json& j)
{
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

Activation parse_activation(const std::string& s)
{
    if (s == "relu") {
        return Activation::Relu;
    }
    if (s == "leaky_relu") {
        return Activation::LeakyRelu;
    }
    throw FormatError(FormatErrorKind::DimensionMismatch, "unknown activation '" + s + "'");
}

Padding parse_padding(const std::string& s)
{
    if (s == "zero") {
        return Padding::Zero;
    }
    if (s == "periodic") {
        return Padding::Periodic;
    }
    throw FormatError(FormatErrorKind::DimensionMismatch, "unknown padding '" + s + "'");
}

json header_of(const Checkpoint& c)
{
    json h;
    h["format"] = "QNT1";
    h["version"] = kVersion;
    h["model"] = {{"depth", c.model.depth},
                  {"base_width", c.model.base_width},
                  {"in_channels", c.model.in_channels},
                  {"out_channels", c.model.out_channels},
                  {"activation", to_string(c.model.activation)},
                  {"padding", to_string(c.model.padding)},
                  {"init_seed", c.model.init_seed}};
    h["train"] = {{"learning_rate", c.train.adam.learning_rate},
                  {"beta1", c.train.adam.beta1},
                  {"beta2", c.train.adam.beta2},
                  {"epsilon", c.train.adam.epsilon},
                  {"epochs", c.train.epochs},
                  {"batch_size", c.train.batch_size},
                  {"seed", c.train.seed}};
    h["normalizer"] = {{"mean", c.normalizer.mean}, {"stddev", c.normalizer.stddev}};
    const auto layers = build_layers(c.model);
    h["parameter_count"] = c.params.size();
    json lt = json::array();
    for (const auto& l : layers) {
        lt.push_back({{"name", l.name},
                      {"c_in", l.c_in},
                      {"c_out", l.c_out},
                      {"kernel", l.kernel},
                      {"weight_offset", l.weight_offset},
                      {"bias_offset", l.bias_offset}});
    }
    h["layers"] = std::move(lt);
    json hist = json::array();
    for (const auto& r : c.history) {
        hist.push_back({{"epoch", r.epoch},
                        {"train_loss", number_or_null(r.train_loss)},
                        {"val_loss", number_or_null(r.val_loss)}});
    }
    h["history"] = std::move(hist);
    h["optimizer"] = c.adam ? json{{"name", "adam"}, {"step", c.adam->step}} : json(nullptr);
    return h;
}

}  // namespace

std::vector<unsigned char> encode_checkpoint(const Checkpoint& ckpt)
{
    const std::size_t expected = [&] {
        const auto layers = build_layers(ckpt.model);
        return layers.back().bias_offset + layers.back().c_out;
    }();
    if (ckpt.params.size() != expected) {
        throw UsageError("checkpoint parameter count does not match its model config");
    }
    if (ckpt.adam && (ckpt.adam->m.size() != expected || ckpt.adam->v.size() != expected)) {
        throw UsageError("checkpoint optimizer state does not match its parameter count");
    }
    const std::string header = header_of(ckpt).dump();
    detail::ByteWriter w;
    w.magic("QNT1");
    w.put<std::uint32_t>(static_cast<std::uint32_t>(header.size()));
    w.raw({reinterpret_cast<const unsigned char*>(header.data()), header.size()});
    w.put_all<float>(ckpt.params);
    if (ckpt.adam) {
        w.put_all<float>(ckpt.adam->m);
        w.put_all<float>(ckpt.adam->v);
    }
    return w.bytes();
}

Checkpoint decode_checkpoint(std::vector<unsigned char> bytes, const std::string& origin)
{
    detail::ByteReader r(std::move(bytes), origin);
    r.expect_magic("QNT1");
    const auto header_len = r.get<std::uint32_t>();
    const auto raw = r.get_all<char>(header_len);
    json h;
    try {
        h = json::parse(raw.begin(), raw.end());
    } catch (const json::exception& e) {
        throw FormatError(FormatErrorKind::DimensionMismatch, origin + ": malformed header: " + e.what());
    }
    Checkpoint c;
    try {
        if (h.at("version").get<int>() != kVersion) {
            throw FormatError(FormatErrorKind::DimensionMismatch, origin + ": unsupported checkpoint version");
        }
        const auto& m = h.at("model");
        c.model.depth = m.at("depth").get<std::size_t>();
        c.model.base_width = m.at("base_width").get<std::size_t>();
        c.model.in_channels = m.at("in_channels").get<std::size_t>();
        c.model.out_channels = m.at("out_channels").get<std::size_t>();
        c.model.activation = parse_activation(m.at("activation").get<std::string>());
        c.model.padding = parse_padding(m.at("padding").get<std::string>());
        c.model.init_seed = m.at("init_seed").get<std::uint64_t>();
        const auto& t = h.at("train");
        c.train.adam.learning_rate = t.at("learning_rate").get<double>();
        c.train.adam.beta1 = t.at("beta1").get<double>();
        c.train.adam.beta2 = t.at("beta2").get<double>();
        c.train.adam.epsilon = t.at("epsilon").get<double>();
        c.train.epochs = t.at("epochs").get<std::size_t>();
        c.train.batch_size = t.at("batch_size").get<std::size_t>();
        c.train.seed = t.at("seed").get<std::uint64_t>();
        c.normalizer.mean = h.at("normalizer").at("mean").get<std::array<double, kTbChannels>>();
        c.normalizer.stddev = h.at("normalizer").at("stddev").get<std::array<double, kTbChannels>>();
        for (const auto& e : h.at("history")) {
            c.history.push_back({e.at("epoch").get<std::size_t>(), number_or_nan(e.at("train_loss")),
                                 number_or_nan(e.at("val_loss"))});
        }
        const auto n = h.at("parameter_count").get<std::size_t>();
        const auto layers = build_layers(c.model);
        if (n != layers.back().bias_offset + layers.back().c_out) {
            throw FormatError(FormatErrorKind::DimensionMismatch,
                              origin + ": parameter_count disagrees with the model config");
        }
        c.params = r.get_all<float>(n);
        if (!h.at("optimizer").is_null()) {
            AdamState<float> s;
            s.step = h.at("optimizer").at("step").get<std::uint64_t>();
            s.m = r.get_all<float>(n);
            s.v = r.get_all<float>(n);
            c.adam = std::move(s);
        }
    } catch (const json::exception& e) {
        throw FormatError(FormatErrorKind::DimensionMismatch, origin + ": bad header field: " + e.what());
    } catch (const UsageError& e) {
        throw FormatError(FormatErrorKind::DimensionMismatch, origin + ": " + e.what());
    }
    r.expect_end();
    return c;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt)
{
    detail::ByteWriter w;
    const auto bytes = encode_checkpoint(ckpt);
    w.raw(bytes);
    w.save(path);
}

Checkpoint read_checkpoint(const std::filesystem::path& path)
{
    auto r = detail::ByteReader::from_file(path);
    auto all = r.get_all<unsigned char>(r.remaining());
    return decode_checkpoint(std::move(all), path.string());
}

TrainState restore_state(const Checkpoint& ckpt)
{
    UNet<float> model(ckpt.model, ckpt.params);
    AdamState<float> adam = ckpt.adam ? *ckpt.adam : AdamState<float>(model.parameter_count());
    return {std::move(model), std::move(adam), ckpt.history};
}

}  // namespace drain::qunet
