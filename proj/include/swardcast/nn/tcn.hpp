#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "swardcast/nn/dense.hpp"
#include "swardcast/nn/matrix.hpp"
#include "swardcast/pipeline.hpp"

namespace swardcast::nn {

/**
 * Dilated causal 1-D convolution. Sequences are (channels x length) matrices;
 * output[co][s] = bias[co] + sum_ci sum_i weight(co, ci*k + i) * x[ci][s - d*i]
 * with x[.][negative] treated as zero, so output length equals input length
 * and position s never sees positions after s.
 */
struct ConvLayer {
    Matrix weights;  // out_channels x (in_channels * kernel)
    std::vector<double> bias;
    std::size_t in_channels = 0;
    std::size_t out_channels = 0;
    int kernel = 1;
    int dilation = 1;
};

/// Prepends (k - 1) * d zero columns; nothing is appended.
Matrix causal_pad(const Matrix& seq, int kernel, int dilation);

Matrix dilated_conv(const ConvLayer& layer, const Matrix& seq);

/**
 * Residual block: out = act(skip(x) + act(conv2(act(conv1(x))))).
 * skip is the identity, or a 1x1 projection when channel counts differ.
 */
struct TcnBlock {
    ConvLayer conv1, conv2;
    Activation activation = Activation::relu;
    bool has_projection = false;
    Matrix projection;  // out_channels x in_channels
    std::vector<double> projection_bias;
};

Matrix residual_block_forward(const TcnBlock& block, const Matrix& seq);

struct TcnConfig {
    int stacks = 1;    // repeats of the whole block stack
    int filters = 16;  // channels per block
    int kernel_size = 2;
    int blocks = 2;    // length of the effective dilation schedule
    std::vector<int> dilations = {1, 2, 4, 8, 16};
    int lag = 2;
    int epochs = 30;
    int batch_size = 32;
    std::uint64_t seed = 42;
    double learning_rate = 0.01;
    Activation activation = Activation::relu;

    void validate() const;

    /// Per-block dilations: the schedule cyclically truncated/extended to
    /// `blocks` entries, repeated `stacks` times.
    std::vector<int> block_dilations() const;
};

/// Trailing input positions that can influence the last output position.
int receptive_field(const TcnConfig& config);
int receptive_field(std::span<const TcnBlock> blocks);

inline constexpr int kConvsPerBlock = 2;

/**
 * Temporal convolutional one-step forecaster: the window enters as a
 * 1-channel sequence, passes through the residual block stack, and the last
 * timestep's channel vector feeds a single linear readout neuron.
 */
class TcnModel {
public:
    static TcnModel init(const TcnConfig& config);

    double predict(std::span<const double> window) const;

    std::size_t parameter_count() const;
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> flat);

    double batch_loss(const WindowedDataset& data, std::size_t begin, std::size_t end) const;
    std::vector<double> batch_gradient(const WindowedDataset& data, std::size_t begin,
                                       std::size_t end) const;

    const TcnConfig& config() const { return cfg_; }
    const std::vector<TcnBlock>& blocks() const { return blocks_; }
    std::vector<TcnBlock>& blocks() { return blocks_; }
    const DenseLayer& readout() const { return readout_; }

    /// Full sequence output of the block stack (tests and diagnostics).
    Matrix forward_sequence(const Matrix& input) const;

private:
    TcnConfig cfg_;
    std::vector<TcnBlock> blocks_;
    DenseLayer readout_;
};

}  // namespace swardcast::nn
