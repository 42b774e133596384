#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "swardcast/nn/dense.hpp"
#include "swardcast/pipeline.hpp"

namespace swardcast::nn {

struct MlpConfig {
    /// Hidden layer widths; empty means a lone linear output neuron.
    std::vector<int> layer_sizes = {10};
    int batch_size = 32;
    int epochs = 50;
    int lag = 2;
    std::uint64_t seed = 42;
    double learning_rate = 0.01;

    void validate() const;
};

/**
 * Feed-forward one-step forecaster: ReLU hidden layers over the lag window,
 * single linear output neuron.
 */
class MlpModel {
public:
    static MlpModel init(const MlpConfig& config);

    /// Next-step forecast (normalized units) from a lag-length window.
    double predict(std::span<const double> window) const;

    std::size_t parameter_count() const;
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> flat);

    /// Mean squared error over samples [begin, end) of the dataset.
    double batch_loss(const WindowedDataset& data, std::size_t begin, std::size_t end) const;
    /// Gradient of batch_loss w.r.t. the flattened parameters.
    std::vector<double> batch_gradient(const WindowedDataset& data, std::size_t begin,
                                       std::size_t end) const;

    const MlpConfig& config() const { return cfg_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }
    std::vector<DenseLayer>& layers() { return layers_; }

private:
    MlpConfig cfg_;
    std::vector<DenseLayer> layers_;  // hidden layers then the linear output layer
};

}  // namespace swardcast::nn
