#include "swardcast/nn/dense.hpp"

#include <cmath>
#include <string>

#include "swardcast/errors.hpp"

namespace swardcast::nn {

DenseLayer dense_init(std::size_t in, std::size_t out, Activation activation, Rng& rng) {
    DenseLayer layer;
    layer.weights = Matrix(out, in);
    layer.bias.assign(out, 0.0);
    layer.activation = activation;
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    for (double& w : layer.weights.data) {
        w = rng.uniform(-limit, limit);
    }
    return layer;
}

void dense_forward(const DenseLayer& layer, std::span<const double> input, DenseCache& cache) {
    if (input.size() != layer.in_size()) {
        throw DimensionMismatch("dense layer expects input of size " +
                                std::to_string(layer.in_size()) + ", got " +
                                std::to_string(input.size()));
    }
    cache.input.assign(input.begin(), input.end());
    cache.preact.resize(layer.out_size());
    matvec(layer.weights, input, cache.preact);
    for (std::size_t r = 0; r < layer.out_size(); ++r) {
        cache.preact[r] += layer.bias[r];
    }
    cache.output.resize(layer.out_size());
    for (std::size_t r = 0; r < layer.out_size(); ++r) {
        cache.output[r] = activate(layer.activation, cache.preact[r]);
    }
}

void dense_backward(const DenseLayer& layer, const DenseCache& cache,
                    std::span<const double> dout, Matrix& dweights, std::vector<double>& dbias,
                    std::vector<double>& dinput) {
    const std::size_t out = layer.out_size();
    std::vector<double> delta(out);
    for (std::size_t r = 0; r < out; ++r) {
        delta[r] = dout[r] * activate_derivative(layer.activation, cache.preact[r], cache.output[r]);
    }
    add_outer(dweights, delta, cache.input);
    for (std::size_t r = 0; r < out; ++r) {
        dbias[r] += delta[r];
    }
    dinput.assign(layer.in_size(), 0.0);
    matvec_transpose_add(layer.weights, delta, dinput);
}

}  // namespace swardcast::nn
