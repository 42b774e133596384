#pragma once

#include <span>
#include <vector>

#include "swardcast/nn/activations.hpp"
#include "swardcast/nn/matrix.hpp"
#include "swardcast/rng.hpp"

namespace swardcast::nn {

/// Fully connected layer: output = activation(W * input + bias).
struct DenseLayer {
    Matrix weights;  // out x in
    std::vector<double> bias;
    Activation activation = Activation::linear;

    std::size_t in_size() const { return weights.cols; }
    std::size_t out_size() const { return weights.rows; }
};

struct DenseCache {
    std::vector<double> input;
    std::vector<double> preact;
    std::vector<double> output;
};

/// Glorot-uniform weights, zero biases.
DenseLayer dense_init(std::size_t in, std::size_t out, Activation activation, Rng& rng);

void dense_forward(const DenseLayer& layer, std::span<const double> input, DenseCache& cache);

/**
 * Accumulates parameter gradients for one sample and writes the gradient
 * w.r.t. the layer input. `dout` is dLoss/doutput.
 */
void dense_backward(const DenseLayer& layer, const DenseCache& cache,
                    std::span<const double> dout, Matrix& dweights, std::vector<double>& dbias,
                    std::vector<double>& dinput);

}  // namespace swardcast::nn
