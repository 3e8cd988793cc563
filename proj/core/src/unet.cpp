#include "drain/unet.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "drain/errors.hpp"

namespace drain::qunet {

const char* to_string(Activation a) noexcept
{
    return a == Activation::LeakyRelu ? "leaky_relu" : "relu";
}

const char* to_string(Padding p) noexcept
{
    return p == Padding::Periodic ? "periodic" : "zero";
}

void ModelConfig::validate() const
{
    if (depth < 1 || depth > 8) {
        throw UsageError("model depth must be in [1, 8]");
    }
    if (base_width < 1 || in_channels < 1 || out_channels < 1) {
        throw UsageError("model widths must be positive");
    }
}

std::vector<ConvLayer> build_layers(const ModelConfig& cfg)
{
    cfg.validate();
    std::vector<ConvLayer> layers;
    std::size_t offset = 0;
    auto add = [&](std::string name, std::size_t c_in, std::size_t c_out, std::size_t k, bool act) {
        ConvLayer l{std::move(name), c_in, c_out, k, offset, 0, act};
        l.bias_offset = offset + l.weight_count();
        offset += l.parameter_count();
        layers.push_back(std::move(l));
    };
    const auto width = [&](std::size_t s) { return cfg.base_width << s; };
    std::size_t c_in = cfg.in_channels;
    for (std::size_t s = 0; s < cfg.depth; ++s) {
        add("enc" + std::to_string(s) + ".conv1", c_in, width(s), 3, true);
        add("enc" + std::to_string(s) + ".conv2", width(s), width(s), 3, true);
        c_in = width(s);
    }
    add("bottleneck.conv1", width(cfg.depth - 1), width(cfg.depth), 3, true);
    add("bottleneck.conv2", width(cfg.depth), width(cfg.depth), 3, true);
    for (std::size_t k = 0; k < cfg.depth; ++k) {
        const std::size_t s = cfg.depth - 1 - k;
        add("dec" + std::to_string(s) + ".up", width(s + 1), width(s), 3, true);
        add("dec" + std::to_string(s) + ".conv1", 2 * width(s), width(s), 3, true);
        add("dec" + std::to_string(s) + ".conv2", width(s), width(s), 3, true);
    }
    add("head", width(0), cfg.out_channels, 1, false);
    return layers;
}

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;
template <typename T>
using ConstVecMap = Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>>;

constexpr double kLeakySlope = 0.01;

std::size_t wrap_index(std::ptrdiff_t i, std::size_t n) noexcept
{
    const auto m = static_cast<std::ptrdiff_t>(n);
    return static_cast<std::size_t>(((i % m) + m) % m);
}

// col rows are ordered (c_in, ky, kx); each row spans the whole batch plane.
template <typename T>
void im2col3(const Tensor<T>& in, Padding pad, Tensor<T>& col)
{
    const std::size_t H = in.h, W = in.w, B = in.b, N = in.plane();
    col = Tensor<T>(in.c * 9, B, H, W);
    const bool periodic = pad == Padding::Periodic;
    for (std::size_t ci = 0; ci < in.c; ++ci) {
        for (std::size_t ky = 0; ky < 3; ++ky) {
            for (std::size_t kx = 0; kx < 3; ++kx) {
                T* dst = col.data.data() + ((ci * 3 + ky) * 3 + kx) * N;
                for (std::size_t b = 0; b < B; ++b) {
                    for (std::size_t y = 0; y < H; ++y) {
                        T* drow = dst + (b * H + y) * W;
                        const auto sy_raw = static_cast<std::ptrdiff_t>(y + ky) - 1;
                        if (sy_raw < 0 || sy_raw >= static_cast<std::ptrdiff_t>(H)) {
                            if (!periodic) {
                                std::fill(drow, drow + W, T(0));
                                continue;
                            }
                        }
                        const std::size_t sy = wrap_index(sy_raw, H);
                        const T* srow = in.data.data() + ci * N + (b * H + sy) * W;
                        if (kx == 1) {
                            std::memcpy(drow, srow, W * sizeof(T));
                        } else if (kx == 0) {
                            drow[0] = periodic ? srow[W - 1] : T(0);
                            std::memcpy(drow + 1, srow, (W - 1) * sizeof(T));
                        } else {
                            std::memcpy(drow, srow + 1, (W - 1) * sizeof(T));
                            drow[W - 1] = periodic ? srow[0] : T(0);
                        }
                    }
                }
            }
        }
    }
}

template <typename T>
void col2im3(const Tensor<T>& col, Padding pad, Tensor<T>& out)
{
    const std::size_t H = out.h, W = out.w, B = out.b, N = out.plane();
    std::fill(out.data.begin(), out.data.end(), T(0));
    const bool periodic = pad == Padding::Periodic;
    for (std::size_t ci = 0; ci < out.c; ++ci) {
        for (std::size_t ky = 0; ky < 3; ++ky) {
            for (std::size_t kx = 0; kx < 3; ++kx) {
                const T* src = col.data.data() + ((ci * 3 + ky) * 3 + kx) * N;
                for (std::size_t b = 0; b < B; ++b) {
                    for (std::size_t y = 0; y < H; ++y) {
                        const T* srow = src + (b * H + y) * W;
                        const auto sy_raw = static_cast<std::ptrdiff_t>(y + ky) - 1;
                        if ((sy_raw < 0 || sy_raw >= static_cast<std::ptrdiff_t>(H)) && !periodic) {
                            continue;
                        }
                        const std::size_t sy = wrap_index(sy_raw, H);
                        T* drow = out.data.data() + ci * N + (b * H + sy) * W;
                        if (kx == 1) {
                            for (std::size_t x = 0; x < W; ++x) {
                                drow[x] += srow[x];
                            }
                        } else if (kx == 0) {
                            if (periodic) {
                                drow[W - 1] += srow[0];
                            }
                            for (std::size_t x = 1; x < W; ++x) {
                                drow[x - 1] += srow[x];
                            }
                        } else {
                            for (std::size_t x = 0; x + 1 < W; ++x) {
                                drow[x + 1] += srow[x];
                            }
                            if (periodic) {
                                drow[0] += srow[W - 1];
                            }
                        }
                    }
                }
            }
        }
    }
}

template <typename T>
void activate(Tensor<T>& t, Activation a)
{
    if (a == Activation::Relu) {
        for (auto& v : t.data) {
            v = v < T(0) ? T(0) : v;  // NaN passes through
        }
    } else {
        const T slope = static_cast<T>(kLeakySlope);
        for (auto& v : t.data) {
            v = v < T(0) ? slope * v : v;
        }
    }
}

// Multiplies an incoming gradient by the activation derivative, read off the
// post-activation output (its sign matches the pre-activation's).
template <typename T>
void activation_backward(const Tensor<T>& out, Activation a, Tensor<T>& grad)
{
    const T low = a == Activation::Relu ? T(0) : static_cast<T>(kLeakySlope);
    for (std::size_t i = 0; i < grad.data.size(); ++i) {
        if (!(out.data[i] > T(0))) {
            grad.data[i] *= low;
        }
    }
}

template <typename T>
void conv_forward(const ConvLayer& layer, const T* params, const Tensor<T>& in, Padding pad, Activation act,
                  Tensor<T>& col, Tensor<T>& out)
{
    const std::size_t K = layer.c_in * layer.kernel * layer.kernel;
    if (layer.kernel == 3) {
        im2col3(in, pad, col);
    } else {
        col = in;
    }
    out = Tensor<T>(layer.c_out, in.b, in.h, in.w);
    const std::size_t N = in.plane();
    ConstMatMap<T> w(params + layer.weight_offset, static_cast<Eigen::Index>(layer.c_out), static_cast<Eigen::Index>(K));
    ConstMatMap<T> c(col.data.data(), static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(N));
    MatMap<T> o(out.data.data(), static_cast<Eigen::Index>(layer.c_out), static_cast<Eigen::Index>(N));
    ConstVecMap<T> bias(params + layer.bias_offset, static_cast<Eigen::Index>(layer.c_out));
    o.noalias() = w * c;
    o.colwise() += bias;
    if (layer.activated) {
        activate(out, act);
    }
}

// grad_out must already include the activation derivative.
template <typename T>
void conv_backward(const ConvLayer& layer, const T* params, const Tensor<T>& col, const Tensor<T>& grad_out,
                   Padding pad, T* grads, Tensor<T>* grad_in)
{
    const std::size_t K = layer.c_in * layer.kernel * layer.kernel;
    const std::size_t N = grad_out.plane();
    ConstMatMap<T> g(grad_out.data.data(), static_cast<Eigen::Index>(layer.c_out), static_cast<Eigen::Index>(N));
    ConstMatMap<T> c(col.data.data(), static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(N));
    MatMap<T> dw(grads + layer.weight_offset, static_cast<Eigen::Index>(layer.c_out), static_cast<Eigen::Index>(K));
    dw.noalias() += g * c.transpose();
    // Sequential sums: Eigen's vectorized row reduction picks its summation
    // order from the runtime alignment of the buffers.
    for (std::size_t r = 0; r < layer.c_out; ++r) {
        const T* row = grad_out.data.data() + r * N;
        T s = T(0);
        for (std::size_t i = 0; i < N; ++i) {
            s += row[i];
        }
        grads[layer.bias_offset + r] += s;
    }
    if (grad_in == nullptr) {
        return;
    }
    ConstMatMap<T> w(params + layer.weight_offset, static_cast<Eigen::Index>(layer.c_out), static_cast<Eigen::Index>(K));
    if (layer.kernel == 3) {
        Tensor<T> dcol(K, grad_out.b, grad_out.h, grad_out.w);
        MatMap<T> dc(dcol.data.data(), static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(N));
        dc.noalias() = w.transpose() * g;
        *grad_in = Tensor<T>(layer.c_in, grad_out.b, grad_out.h, grad_out.w);
        col2im3(dcol, pad, *grad_in);
    } else {
        *grad_in = Tensor<T>(layer.c_in, grad_out.b, grad_out.h, grad_out.w);
        MatMap<T> gi(grad_in->data.data(), static_cast<Eigen::Index>(layer.c_in), static_cast<Eigen::Index>(N));
        gi.noalias() = w.transpose() * g;
    }
}

template <typename T>
Tensor<T> maxpool2(const Tensor<T>& in, std::vector<std::uint32_t>& argmax)
{
    if (in.size() > std::numeric_limits<std::uint32_t>::max()) {
        throw UsageError("activation tensor too large for pooling indices");
    }
    const std::size_t ho = in.h / 2, wo = in.w / 2;
    Tensor<T> out(in.c, in.b, ho, wo);
    argmax.assign(out.size(), 0);
    std::size_t o = 0;
    for (std::size_t cb = 0; cb < in.c * in.b; ++cb) {
        const std::size_t base = cb * in.h * in.w;
        for (std::size_t y = 0; y < ho; ++y) {
            for (std::size_t x = 0; x < wo; ++x, ++o) {
                std::size_t best = base + (2 * y) * in.w + 2 * x;
                const std::size_t cand[3] = {best + 1, best + in.w, best + in.w + 1};
                for (auto idx : cand) {
                    if (in.data[idx] > in.data[best]) {
                        best = idx;
                    }
                }
                out.data[o] = in.data[best];
                argmax[o] = static_cast<std::uint32_t>(best);
            }
        }
    }
    return out;
}

template <typename T>
void maxpool2_backward(const Tensor<T>& grad_out, const std::vector<std::uint32_t>& argmax, Tensor<T>& grad_in)
{
    for (std::size_t o = 0; o < grad_out.size(); ++o) {
        grad_in.data[argmax[o]] += grad_out.data[o];
    }
}

template <typename T>
Tensor<T> upsample2(const Tensor<T>& in)
{
    Tensor<T> out(in.c, in.b, in.h * 2, in.w * 2);
    for (std::size_t cb = 0; cb < in.c * in.b; ++cb) {
        const T* src = in.data.data() + cb * in.h * in.w;
        T* dst = out.data.data() + cb * out.h * out.w;
        for (std::size_t y = 0; y < out.h; ++y) {
            const T* srow = src + (y / 2) * in.w;
            T* drow = dst + y * out.w;
            for (std::size_t x = 0; x < out.w; ++x) {
                drow[x] = srow[x / 2];
            }
        }
    }
    return out;
}

template <typename T>
Tensor<T> upsample2_backward(const Tensor<T>& grad_out)
{
    Tensor<T> grad_in(grad_out.c, grad_out.b, grad_out.h / 2, grad_out.w / 2);
    for (std::size_t cb = 0; cb < grad_out.c * grad_out.b; ++cb) {
        const T* src = grad_out.data.data() + cb * grad_out.h * grad_out.w;
        T* dst = grad_in.data.data() + cb * grad_in.h * grad_in.w;
        for (std::size_t y = 0; y < grad_out.h; ++y) {
            const T* srow = src + y * grad_out.w;
            T* drow = dst + (y / 2) * grad_in.w;
            for (std::size_t x = 0; x < grad_out.w; ++x) {
                drow[x / 2] += srow[x];
            }
        }
    }
    return grad_in;
}

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b)
{
    Tensor<T> out;
    out.c = a.c + b.c;
    out.b = a.b;
    out.h = a.h;
    out.w = a.w;
    out.data.reserve(a.size() + b.size());
    out.data.insert(out.data.end(), a.data.begin(), a.data.end());
    out.data.insert(out.data.end(), b.data.begin(), b.data.end());
    return out;
}

template <typename T>
Tensor<T> slice_channels(const Tensor<T>& t, std::size_t first, std::size_t count)
{
    Tensor<T> out;
    out.c = count;
    out.b = t.b;
    out.h = t.h;
    out.w = t.w;
    const auto begin = t.data.begin() + static_cast<std::ptrdiff_t>(first * t.plane());
    out.data.assign(begin, begin + static_cast<std::ptrdiff_t>(count * t.plane()));
    return out;
}

}  // namespace

template <typename T>
UNet<T>::UNet(ModelConfig cfg) : cfg_(std::move(cfg)), layers_(build_layers(cfg_))
{
    params_.assign(layers_.back().bias_offset + layers_.back().c_out, T(0));
    std::mt19937_64 rng(cfg_.init_seed);
    for (const auto& l : layers_) {
        const double fan_in = static_cast<double>(l.c_in * l.kernel * l.kernel);
        const double fan_out = static_cast<double>(l.c_out * l.kernel * l.kernel);
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (std::size_t i = 0; i < l.weight_count(); ++i) {
            params_[l.weight_offset + i] = static_cast<T>(dist(rng));
        }
    }
}

template <typename T>
UNet<T>::UNet(ModelConfig cfg, std::vector<T> params)
    : cfg_(std::move(cfg)), layers_(build_layers(cfg_)), params_(std::move(params))
{
    const std::size_t expected = layers_.back().bias_offset + layers_.back().c_out;
    if (params_.size() != expected) {
        throw DataError("parameter vector has " + std::to_string(params_.size()) + " entries, model needs " +
                        std::to_string(expected));
    }
}

template <typename T>
Tensor<T> UNet<T>::forward(const Tensor<T>& input) const
{
    Tape tape;
    forward(input, tape);
    return std::move(tape.output);
}

template <typename T>
const Tensor<T>& UNet<T>::forward(const Tensor<T>& input, Tape& tape) const
{
    const std::size_t D = cfg_.depth;
    const std::size_t m = cfg_.tile_multiple();
    if (input.c != cfg_.in_channels) {
        throw UsageError("input has " + std::to_string(input.c) + " channels, model expects " +
                         std::to_string(cfg_.in_channels));
    }
    if (input.h == 0 || input.w == 0 || input.h % m != 0 || input.w % m != 0) {
        throw TileError("tile " + std::to_string(input.h) + "x" + std::to_string(input.w) +
                        " is not divisible by " + std::to_string(m) + "; crop_to_tile it first");
    }
    const T* p = params_.data();
    const Padding pad = cfg_.padding;
    const Activation act = cfg_.activation;
    tape.cols.assign(layers_.size(), {});
    tape.outs.assign(layers_.size(), {});
    tape.pool_argmax.assign(D, {});

    Tensor<T> pooled;
    const Tensor<T>* x = &input;
    for (std::size_t s = 0; s < D; ++s) {
        conv_forward(layers_[2 * s], p, *x, pad, act, tape.cols[2 * s], tape.outs[2 * s]);
        conv_forward(layers_[2 * s + 1], p, tape.outs[2 * s], pad, act, tape.cols[2 * s + 1], tape.outs[2 * s + 1]);
        pooled = maxpool2(tape.outs[2 * s + 1], tape.pool_argmax[s]);
        x = &pooled;
    }
    conv_forward(layers_[2 * D], p, pooled, pad, act, tape.cols[2 * D], tape.outs[2 * D]);
    conv_forward(layers_[2 * D + 1], p, tape.outs[2 * D], pad, act, tape.cols[2 * D + 1], tape.outs[2 * D + 1]);
    const Tensor<T>* y = &tape.outs[2 * D + 1];
    for (std::size_t k = 0; k < D; ++k) {
        const std::size_t s = D - 1 - k;
        const std::size_t base = 2 * D + 2 + 3 * k;
        const auto up = upsample2(*y);
        conv_forward(layers_[base], p, up, pad, act, tape.cols[base], tape.outs[base]);
        const auto cat = concat_channels(tape.outs[base], tape.outs[2 * s + 1]);
        conv_forward(layers_[base + 1], p, cat, pad, act, tape.cols[base + 1], tape.outs[base + 1]);
        conv_forward(layers_[base + 2], p, tape.outs[base + 1], pad, act, tape.cols[base + 2], tape.outs[base + 2]);
        y = &tape.outs[base + 2];
    }
    const std::size_t head = layers_.size() - 1;
    conv_forward(layers_[head], p, *y, pad, act, tape.cols[head], tape.output);
    return tape.output;
}

template <typename T>
void UNet<T>::backward(const Tape& tape, const Tensor<T>& grad_output, std::span<T> grads) const
{
    if (grads.size() != params_.size()) {
        throw UsageError("gradient buffer size differs from parameter count");
    }
    if (grad_output.size() != tape.output.size()) {
        throw UsageError("output gradient shape differs from the forward output");
    }
    const std::size_t D = cfg_.depth;
    const T* p = params_.data();
    T* dp = grads.data();
    const Padding pad = cfg_.padding;
    const Activation act = cfg_.activation;

    auto through = [&](std::size_t id, Tensor<T> g, bool need_input) {
        if (layers_[id].activated) {
            activation_backward(tape.outs[id], act, g);
        }
        Tensor<T> gin;
        conv_backward(layers_[id], p, tape.cols[id], g, pad, dp, need_input ? &gin : nullptr);
        return gin;
    };

    Tensor<T> g = through(layers_.size() - 1, grad_output, true);
    std::vector<Tensor<T>> grad_skip(D);
    for (std::size_t s = 0; s < D; ++s) {
        const std::size_t base = 2 * D + 2 + 3 * (D - 1 - s);
        g = through(base + 2, std::move(g), true);
        Tensor<T> g_cat = through(base + 1, std::move(g), true);
        const std::size_t c = layers_[base].c_out;
        grad_skip[s] = slice_channels(g_cat, c, c);
        Tensor<T> g_up = through(base, slice_channels(g_cat, 0, c), true);
        g = upsample2_backward(g_up);
    }
    g = through(2 * D + 1, std::move(g), true);
    g = through(2 * D, std::move(g), true);
    for (std::size_t k = 0; k < D; ++k) {
        const std::size_t s = D - 1 - k;
        const auto& pre_pool = tape.outs[2 * s + 1];
        Tensor<T> g_a(pre_pool.c, pre_pool.b, pre_pool.h, pre_pool.w);
        maxpool2_backward(g, tape.pool_argmax[s], g_a);
        for (std::size_t i = 0; i < g_a.size(); ++i) {
            g_a.data[i] += grad_skip[s].data[i];
        }
        g = through(2 * s + 1, std::move(g_a), true);
        g = through(2 * s, std::move(g), s != 0);
    }
}

template class UNet<float>;
template class UNet<double>;

}  // namespace drain::qunet
