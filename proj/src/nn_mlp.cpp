#include "swardcast/nn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swardcast/errors.hpp"

namespace swardcast::nn {

void MlpConfig::validate() const {
    if (lag < 1 || epochs < 1 || batch_size < 1) {
        throw ConfigError("lag, epochs and batch_size must be at least 1");
    }
    for (int width : layer_sizes) {
        if (width < 1) {
            throw ConfigError("hidden layer widths must be positive");
        }
    }
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("learning_rate must be a finite non-negative number");
    }
}

MlpModel MlpModel::init(const MlpConfig& config) {
    config.validate();
    MlpModel model;
    model.cfg_ = config;
    Rng rng(config.seed);
    std::size_t in = static_cast<std::size_t>(config.lag);
    for (int width : config.layer_sizes) {
        model.layers_.push_back(dense_init(in, static_cast<std::size_t>(width), Activation::relu, rng));
        in = static_cast<std::size_t>(width);
    }
    model.layers_.push_back(dense_init(in, 1, Activation::linear, rng));
    return model;
}

double MlpModel::predict(std::span<const double> window) const {
    DenseCache cache;
    std::vector<double> current(window.begin(), window.end());
    for (const auto& layer : layers_) {
        dense_forward(layer, current, cache);
        current = cache.output;
    }
    return current[0];
}

std::size_t MlpModel::parameter_count() const {
    std::size_t count = 0;
    for (const auto& layer : layers_) {
        count += layer.weights.size() + layer.bias.size();
    }
    return count;
}

std::vector<double> MlpModel::parameters() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (const auto& layer : layers_) {
        flat.insert(flat.end(), layer.weights.data.begin(), layer.weights.data.end());
        flat.insert(flat.end(), layer.bias.begin(), layer.bias.end());
    }
    return flat;
}

void MlpModel::set_parameters(std::span<const double> flat) {
    if (flat.size() != parameter_count()) {
        throw DimensionMismatch("expected " + std::to_string(parameter_count()) +
                                " parameters, got " + std::to_string(flat.size()));
    }
    std::size_t pos = 0;
    for (auto& layer : layers_) {
        std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                  flat.begin() + static_cast<std::ptrdiff_t>(pos + layer.weights.size()),
                  layer.weights.data.begin());
        pos += layer.weights.size();
        std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                  flat.begin() + static_cast<std::ptrdiff_t>(pos + layer.bias.size()),
                  layer.bias.begin());
        pos += layer.bias.size();
    }
}

double MlpModel::batch_loss(const WindowedDataset& data, std::size_t begin, std::size_t end) const {
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

std::vector<double> MlpModel::batch_gradient(const WindowedDataset& data, std::size_t begin,
                                             std::size_t end) const {
    if (begin >= end || end > data.size()) {
        throw DimensionMismatch("invalid batch range");
    }
    const std::size_t n_layers = layers_.size();
    std::vector<Matrix> dweights(n_layers);
    std::vector<std::vector<double>> dbias(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        dweights[l] = Matrix(layers_[l].weights.rows, layers_[l].weights.cols);
        dbias[l].assign(layers_[l].bias.size(), 0.0);
    }

    const double inv_n = 1.0 / static_cast<double>(end - begin);
    std::vector<DenseCache> caches(n_layers);
    std::vector<double> grad_buf, dinput;
    for (std::size_t i = begin; i < end; ++i) {
        std::span<const double> current(data.inputs[i]);
        for (std::size_t l = 0; l < n_layers; ++l) {
            dense_forward(layers_[l], current, caches[l]);
            current = caches[l].output;
        }
        // d/do of (1/N) * sum (y - o)^2
        grad_buf.assign(1, 2.0 * (caches[n_layers - 1].output[0] - data.targets[i]) * inv_n);
        for (std::size_t l = n_layers; l-- > 0;) {
            dense_backward(layers_[l], caches[l], grad_buf, dweights[l], dbias[l], dinput);
            grad_buf.swap(dinput);
        }
    }

    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (std::size_t l = 0; l < n_layers; ++l) {
        flat.insert(flat.end(), dweights[l].data.begin(), dweights[l].data.end());
        flat.insert(flat.end(), dbias[l].begin(), dbias[l].end());
    }
    return flat;
}

}  // namespace swardcast::nn
