#include "swardcast/nn/tcn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swardcast/errors.hpp"
#include "swardcast/nn/activations.hpp"

namespace swardcast::nn {

Matrix causal_pad(const Matrix& seq, int kernel, int dilation) {
    if (kernel < 1 || dilation < 1) {
        throw ConfigError("kernel and dilation must be at least 1");
    }
    const std::size_t pad = static_cast<std::size_t>(kernel - 1) * static_cast<std::size_t>(dilation);
    Matrix out(seq.rows, seq.cols + pad);
    for (std::size_t c = 0; c < seq.rows; ++c) {
        for (std::size_t s = 0; s < seq.cols; ++s) {
            out(c, s + pad) = seq(c, s);
        }
    }
    return out;
}

Matrix dilated_conv(const ConvLayer& layer, const Matrix& seq) {
    if (seq.rows != layer.in_channels) {
        throw DimensionMismatch("conv expects " + std::to_string(layer.in_channels) +
                                " channels, got " + std::to_string(seq.rows));
    }
    const std::size_t L = seq.cols;
    const int k = layer.kernel;
    const int d = layer.dilation;
    Matrix out(layer.out_channels, L);
    for (std::size_t co = 0; co < layer.out_channels; ++co) {
        const double* wrow = layer.weights.data.data() + co * layer.weights.cols;
        for (std::size_t s = 0; s < L; ++s) {
            double acc = layer.bias[co];
            for (std::size_t ci = 0; ci < layer.in_channels; ++ci) {
                const double* x = seq.data.data() + ci * L;
                const double* w = wrow + ci * static_cast<std::size_t>(k);
                for (int i = 0; i < k; ++i) {
                    const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(s) -
                                               static_cast<std::ptrdiff_t>(d) * i;
                    if (idx < 0) break;  // earlier taps reach further back
                    acc += w[i] * x[idx];
                }
            }
            out(co, s) = acc;
        }
    }
    return out;
}

namespace {

Matrix apply_activation(const Matrix& m, Activation act) {
    Matrix out = m;
    for (double& v : out.data) {
        v = activate(act, v);
    }
    return out;
}

Matrix projection_forward(const TcnBlock& block, const Matrix& seq) {
    Matrix out(block.projection.rows, seq.cols);
    for (std::size_t co = 0; co < block.projection.rows; ++co) {
        for (std::size_t s = 0; s < seq.cols; ++s) {
            double acc = block.projection_bias[co];
            for (std::size_t ci = 0; ci < block.projection.cols; ++ci) {
                acc += block.projection(co, ci) * seq(ci, s);
            }
            out(co, s) = acc;
        }
    }
    return out;
}

struct BlockCache {
    Matrix input, u1, v1, u2, v2, skip, pre, out;
};

void block_forward(const TcnBlock& block, const Matrix& seq, BlockCache& cache) {
    cache.input = seq;
    cache.u1 = dilated_conv(block.conv1, seq);
    cache.v1 = apply_activation(cache.u1, block.activation);
    cache.u2 = dilated_conv(block.conv2, cache.v1);
    cache.v2 = apply_activation(cache.u2, block.activation);
    if (block.has_projection) {
        cache.skip = projection_forward(block, seq);
    } else {
        if (seq.rows != cache.v2.rows) {
            throw DimensionMismatch("residual block channel mismatch without projection");
        }
        cache.skip = seq;
    }
    cache.pre = cache.v2;
    for (std::size_t i = 0; i < cache.pre.data.size(); ++i) {
        cache.pre.data[i] += cache.skip.data[i];
    }
    cache.out = apply_activation(cache.pre, block.activation);
}

struct ConvGrads {
    Matrix dweights;
    std::vector<double> dbias;

    explicit ConvGrads(const ConvLayer& l)
        : dweights(l.weights.rows, l.weights.cols), dbias(l.bias.size(), 0.0) {}
};

struct BlockGrads {
    ConvGrads conv1, conv2;
    Matrix dprojection;
    std::vector<double> dprojection_bias;

    explicit BlockGrads(const TcnBlock& b)
        : conv1(b.conv1), conv2(b.conv2),
          dprojection(b.projection.rows, b.projection.cols),
          dprojection_bias(b.projection_bias.size(), 0.0) {}
};

// Accumulates weight/bias gradients and writes dLoss/dinput.
void conv_backward(const ConvLayer& layer, const Matrix& input, const Matrix& dout,
                   ConvGrads& grads, Matrix& dinput) {
    const std::size_t L = input.cols;
    const int k = layer.kernel;
    const int d = layer.dilation;
    dinput = Matrix(layer.in_channels, L);
    for (std::size_t co = 0; co < layer.out_channels; ++co) {
        const double* wrow = layer.weights.data.data() + co * layer.weights.cols;
        double* gwrow = grads.dweights.data.data() + co * grads.dweights.cols;
        for (std::size_t s = 0; s < L; ++s) {
            const double g = dout(co, s);
            grads.dbias[co] += g;
            for (std::size_t ci = 0; ci < layer.in_channels; ++ci) {
                const double* x = input.data.data() + ci * L;
                double* dx = dinput.data.data() + ci * L;
                const std::size_t base = ci * static_cast<std::size_t>(k);
                for (int i = 0; i < k; ++i) {
                    const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(s) -
                                               static_cast<std::ptrdiff_t>(d) * i;
                    if (idx < 0) break;
                    gwrow[base + static_cast<std::size_t>(i)] += g * x[idx];
                    dx[idx] += wrow[base + static_cast<std::size_t>(i)] * g;
                }
            }
        }
    }
}

void block_backward(const TcnBlock& block, const BlockCache& cache, const Matrix& dout,
                    BlockGrads& grads, Matrix& dinput) {
    Matrix dpre = dout;
    for (std::size_t i = 0; i < dpre.data.size(); ++i) {
        dpre.data[i] *= activate_derivative(block.activation, cache.pre.data[i], cache.out.data[i]);
    }

    Matrix du2 = dpre;
    for (std::size_t i = 0; i < du2.data.size(); ++i) {
        du2.data[i] *= activate_derivative(block.activation, cache.u2.data[i], cache.v2.data[i]);
    }
    Matrix dv1;
    conv_backward(block.conv2, cache.v1, du2, grads.conv2, dv1);
    Matrix du1 = dv1;
    for (std::size_t i = 0; i < du1.data.size(); ++i) {
        du1.data[i] *= activate_derivative(block.activation, cache.u1.data[i], cache.v1.data[i]);
    }
    conv_backward(block.conv1, cache.input, du1, grads.conv1, dinput);

    if (block.has_projection) {
        for (std::size_t co = 0; co < block.projection.rows; ++co) {
            for (std::size_t s = 0; s < cache.input.cols; ++s) {
                const double g = dpre(co, s);
                grads.dprojection_bias[co] += g;
                for (std::size_t ci = 0; ci < block.projection.cols; ++ci) {
                    grads.dprojection(co, ci) += g * cache.input(ci, s);
                    dinput(ci, s) += block.projection(co, ci) * g;
                }
            }
        }
    } else {
        for (std::size_t i = 0; i < dinput.data.size(); ++i) {
            dinput.data[i] += dpre.data[i];
        }
    }
}

ConvLayer conv_init(std::size_t in_ch, std::size_t out_ch, int kernel, int dilation, Rng& rng) {
    ConvLayer l;
    l.in_channels = in_ch;
    l.out_channels = out_ch;
    l.kernel = kernel;
    l.dilation = dilation;
    l.weights = Matrix(out_ch, in_ch * static_cast<std::size_t>(kernel));
    l.bias.assign(out_ch, 0.0);
    const double limit =
        std::sqrt(6.0 / (static_cast<double>(in_ch + out_ch) * static_cast<double>(kernel)));
    for (double& w : l.weights.data) {
        w = rng.uniform(-limit, limit);
    }
    return l;
}

}  // namespace

Matrix residual_block_forward(const TcnBlock& block, const Matrix& seq) {
    BlockCache cache;
    block_forward(block, seq, cache);
    return cache.out;
}

void TcnConfig::validate() const {
    if (stacks < 1 || filters < 1 || kernel_size < 1 || blocks < 1) {
        throw ConfigError("stacks, filters, kernel_size and blocks must be at least 1");
    }
    if (dilations.empty() || dilations.front() != 1) {
        throw ConfigError("dilations must start at 1");
    }
    for (std::size_t i = 1; i < dilations.size(); ++i) {
        if (dilations[i] <= dilations[i - 1]) {
            throw ConfigError("dilations must be strictly increasing");
        }
    }
    if (lag < 1 || epochs < 1 || batch_size < 1) {
        throw ConfigError("lag, epochs and batch_size must be at least 1");
    }
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("learning_rate must be a finite non-negative number");
    }
}

std::vector<int> TcnConfig::block_dilations() const {
    std::vector<int> result;
    result.reserve(static_cast<std::size_t>(stacks) * static_cast<std::size_t>(blocks));
    for (int s = 0; s < stacks; ++s) {
        for (int b = 0; b < blocks; ++b) {
            result.push_back(dilations[static_cast<std::size_t>(b) % dilations.size()]);
        }
    }
    return result;
}

int receptive_field(const TcnConfig& config) {
    config.validate();
    int field = 1;
    for (int d : config.block_dilations()) {
        field += kConvsPerBlock * (config.kernel_size - 1) * d;
    }
    return field;
}

int receptive_field(std::span<const TcnBlock> blocks) {
    int field = 1;
    for (const auto& b : blocks) {
        field += (b.conv1.kernel - 1) * b.conv1.dilation + (b.conv2.kernel - 1) * b.conv2.dilation;
    }
    return field;
}

TcnModel TcnModel::init(const TcnConfig& config) {
    config.validate();
    TcnModel model;
    model.cfg_ = config;
    Rng rng(config.seed);
    std::size_t in = 1;
    const auto filters = static_cast<std::size_t>(config.filters);
    for (int d : config.block_dilations()) {
        TcnBlock block;
        block.conv1 = conv_init(in, filters, config.kernel_size, d, rng);
        block.conv2 = conv_init(filters, filters, config.kernel_size, d, rng);
        block.activation = config.activation;
        if (in != filters) {
            block.has_projection = true;
            block.projection = Matrix(filters, in);
            const double limit = std::sqrt(6.0 / static_cast<double>(in + filters));
            for (double& w : block.projection.data) {
                w = rng.uniform(-limit, limit);
            }
            block.projection_bias.assign(filters, 0.0);
        }
        model.blocks_.push_back(std::move(block));
        in = filters;
    }
    model.readout_ = dense_init(in, 1, Activation::linear, rng);
    return model;
}

Matrix TcnModel::forward_sequence(const Matrix& input) const {
    Matrix current = input;
    BlockCache cache;
    for (const auto& block : blocks_) {
        block_forward(block, current, cache);
        current = cache.out;
    }
    return current;
}

double TcnModel::predict(std::span<const double> window) const {
    if (window.size() != static_cast<std::size_t>(cfg_.lag)) {
        throw DimensionMismatch("window length " + std::to_string(window.size()) +
                                " does not match lag " + std::to_string(cfg_.lag));
    }
    Matrix input(1, window.size());
    std::copy(window.begin(), window.end(), input.data.begin());
    Matrix seq = forward_sequence(input);
    std::vector<double> last(seq.rows);
    for (std::size_t c = 0; c < seq.rows; ++c) {
        last[c] = seq(c, seq.cols - 1);
    }
    DenseCache cache;
    dense_forward(readout_, last, cache);
    return cache.output[0];
}

std::size_t TcnModel::parameter_count() const {
    std::size_t count = 0;
    for (const auto& b : blocks_) {
        count += b.conv1.weights.size() + b.conv1.bias.size();
        count += b.conv2.weights.size() + b.conv2.bias.size();
        if (b.has_projection) {
            count += b.projection.size() + b.projection_bias.size();
        }
    }
    return count + readout_.weights.size() + readout_.bias.size();
}

std::vector<double> TcnModel::parameters() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (const auto& b : blocks_) {
        flat.insert(flat.end(), b.conv1.weights.data.begin(), b.conv1.weights.data.end());
        flat.insert(flat.end(), b.conv1.bias.begin(), b.conv1.bias.end());
        flat.insert(flat.end(), b.conv2.weights.data.begin(), b.conv2.weights.data.end());
        flat.insert(flat.end(), b.conv2.bias.begin(), b.conv2.bias.end());
        if (b.has_projection) {
            flat.insert(flat.end(), b.projection.data.begin(), b.projection.data.end());
            flat.insert(flat.end(), b.projection_bias.begin(), b.projection_bias.end());
        }
    }
    flat.insert(flat.end(), readout_.weights.data.begin(), readout_.weights.data.end());
    flat.insert(flat.end(), readout_.bias.begin(), readout_.bias.end());
    return flat;
}

void TcnModel::set_parameters(std::span<const double> flat) {
    if (flat.size() != parameter_count()) {
        throw DimensionMismatch("expected " + std::to_string(parameter_count()) +
                                " parameters, got " + std::to_string(flat.size()));
    }
    std::size_t pos = 0;
    auto take = [&](double* dst, std::size_t n) {
        std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                  flat.begin() + static_cast<std::ptrdiff_t>(pos + n), dst);
        pos += n;
    };
    for (auto& b : blocks_) {
        take(b.conv1.weights.data.data(), b.conv1.weights.size());
        take(b.conv1.bias.data(), b.conv1.bias.size());
        take(b.conv2.weights.data.data(), b.conv2.weights.size());
        take(b.conv2.bias.data(), b.conv2.bias.size());
        if (b.has_projection) {
            take(b.projection.data.data(), b.projection.size());
            take(b.projection_bias.data(), b.projection_bias.size());
        }
    }
    take(readout_.weights.data.data(), readout_.weights.size());
    take(readout_.bias.data(), readout_.bias.size());
}

double TcnModel::batch_loss(const WindowedDataset& data, std::size_t begin, std::size_t end) const {
    if (begin >= end || end > data.size()) {
        throw DimensionMismatch("invalid batch range");
    }
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        double e = data.targets[i] - predict(data.inputs[i]);
        sum += e * e;
    }
    return sum / static_cast<double>(end - begin);
}

std::vector<double> TcnModel::batch_gradient(const WindowedDataset& data, std::size_t begin,
                                             std::size_t end) const {
    if (begin >= end || end > data.size()) {
        throw DimensionMismatch("invalid batch range");
    }
    std::vector<BlockGrads> grads;
    grads.reserve(blocks_.size());
    for (const auto& b : blocks_) {
        grads.emplace_back(b);
    }
    Matrix d_readout_w(readout_.weights.rows, readout_.weights.cols);
    std::vector<double> d_readout_b(readout_.bias.size(), 0.0);

    const double inv_n = 1.0 / static_cast<double>(end - begin);
    const std::size_t L = static_cast<std::size_t>(cfg_.lag);
    std::vector<BlockCache> caches(blocks_.size());
    DenseCache readout_cache;
    std::vector<double> dout(1), d_last;

    for (std::size_t i = begin; i < end; ++i) {
        Matrix current(1, L);
        std::copy(data.inputs[i].begin(), data.inputs[i].end(), current.data.begin());
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
            block_forward(blocks_[b], current, caches[b]);
            current = caches[b].out;
        }
        std::vector<double> last(current.rows);
        for (std::size_t c = 0; c < current.rows; ++c) {
            last[c] = current(c, current.cols - 1);
        }
        dense_forward(readout_, last, readout_cache);

        dout[0] = 2.0 * (readout_cache.output[0] - data.targets[i]) * inv_n;
        dense_backward(readout_, readout_cache, dout, d_readout_w, d_readout_b, d_last);

        Matrix dseq(current.rows, current.cols);
        for (std::size_t c = 0; c < current.rows; ++c) {
            dseq(c, current.cols - 1) = d_last[c];
        }
        for (std::size_t b = blocks_.size(); b-- > 0;) {
            Matrix dinput;
            block_backward(blocks_[b], caches[b], dseq, grads[b], dinput);
            dseq = std::move(dinput);
        }
    }

    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        const auto& g = grads[b];
        flat.insert(flat.end(), g.conv1.dweights.data.begin(), g.conv1.dweights.data.end());
        flat.insert(flat.end(), g.conv1.dbias.begin(), g.conv1.dbias.end());
        flat.insert(flat.end(), g.conv2.dweights.data.begin(), g.conv2.dweights.data.end());
        flat.insert(flat.end(), g.conv2.dbias.begin(), g.conv2.dbias.end());
        if (blocks_[b].has_projection) {
            flat.insert(flat.end(), g.dprojection.data.begin(), g.dprojection.data.end());
            flat.insert(flat.end(), g.dprojection_bias.begin(), g.dprojection_bias.end());
        }
    }
    flat.insert(flat.end(), d_readout_w.data.begin(), d_readout_w.data.end());
    flat.insert(flat.end(), d_readout_b.begin(), d_readout_b.end());
    return flat;
}

}  // namespace swardcast::nn
