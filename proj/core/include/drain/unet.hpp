#pragma once

// Quantile-regression U-Net with hand-written backpropagation.
//
// Encoder stage s (s = 0..depth-1): two 3x3 convolutions + activation with
// width base*2^s, then 2x2 max-pool. Bottleneck: two 3x3 convolutions with
// width base*2^depth. Decoder stage s (s = depth-1..0): nearest 2x upsample,
// 3x3 convolution + activation down to base*2^s, concatenation with the
// encoder skip (upsampled rows first), two 3x3 convolutions + activation.
// Head: linear 1x1 convolution to one channel per quantile level.
//
// Activations are stored channel-major over the whole batch, [C][B][H][W],
// so each convolution is a single GEMM and concatenation stacks rows.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace drain::qunet {

enum class Activation { Relu, LeakyRelu };
enum class Padding { Zero, Periodic };

const char* to_string(Activation a) noexcept;
const char* to_string(Padding p) noexcept;

struct ModelConfig {
    std::size_t depth = 4;
    std::size_t base_width = 8;
    std::size_t in_channels = 4;
    std::size_t out_channels = 99;
    Activation activation = Activation::Relu;
    Padding padding = Padding::Zero;
    std::uint64_t init_seed = 1;

    void validate() const;
    /// Spatial dimensions must be divisible by this.
    std::size_t tile_multiple() const noexcept { return std::size_t{1} << depth; }
};

/// One convolution's slice of the flat parameter vector. Weights are
/// [c_out][c_in][k][k] row-major, followed by c_out biases.
struct ConvLayer {
    std::string name;
    std::size_t c_in = 0;
    std::size_t c_out = 0;
    std::size_t kernel = 3;
    std::size_t weight_offset = 0;
    std::size_t bias_offset = 0;
    bool activated = true;

    std::size_t weight_count() const noexcept { return c_out * c_in * kernel * kernel; }
    std::size_t parameter_count() const noexcept { return weight_count() + c_out; }
};

/// Layer list in parameter-blob order: enc{s}.conv{1,2}, bottleneck.conv{1,2},
/// dec{s}.up, dec{s}.conv{1,2} (s descending), head.
std::vector<ConvLayer> build_layers(const ModelConfig& cfg);

/// Activation tensor of shape [C][B][H][W].
template <typename T>
struct Tensor {
    std::size_t c = 0;
    std::size_t b = 0;
    std::size_t h = 0;
    std::size_t w = 0;
    std::vector<T> data;

    Tensor() = default;
    Tensor(std::size_t c_, std::size_t b_, std::size_t h_, std::size_t w_)
        : c(c_), b(b_), h(h_), w(w_), data(c_ * b_ * h_ * w_, T(0))
    {
    }
    std::size_t plane() const noexcept { return b * h * w; }
    std::size_t size() const noexcept { return data.size(); }
};

template <typename T>
class UNet {
public:
    /// Glorot-uniform weights from cfg.init_seed, zero biases.
    explicit UNet(ModelConfig cfg);
    /// Adopts an existing parameter vector (e.g. from a checkpoint).
    UNet(ModelConfig cfg, std::vector<T> params);

    const ModelConfig& config() const noexcept { return cfg_; }
    const std::vector<ConvLayer>& layers() const noexcept { return layers_; }
    std::size_t parameter_count() const noexcept { return params_.size(); }

    std::span<const T> params() const noexcept { return params_; }
    std::span<T> params() noexcept { return params_; }

    /// Intermediate values kept for the backward pass.
    struct Tape {
        std::vector<Tensor<T>> cols;
        std::vector<Tensor<T>> outs;
        std::vector<std::vector<std::uint32_t>> pool_argmax;
        Tensor<T> output;
    };

    /// Input [in_channels][B][H][W]; H and W divisible by 2^depth, else TileError.
    Tensor<T> forward(const Tensor<T>& input) const;
    const Tensor<T>& forward(const Tensor<T>& input, Tape& tape) const;

    /// Accumulates d loss / d params into `grads` given d loss / d output.
    void backward(const Tape& tape, const Tensor<T>& grad_output, std::span<T> grads) const;

private:
    ModelConfig cfg_;
    std::vector<ConvLayer> layers_;
    std::vector<T> params_;
};

extern template class UNet<float>;
extern template class UNet<double>;

}  // namespace drain::qunet
