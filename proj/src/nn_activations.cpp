#include "swardcast/nn/activations.hpp"

#include "swardcast/errors.hpp"

namespace swardcast::nn {

std::string to_string(Activation kind) {
    switch (kind) {
        case Activation::relu: return "relu";
        case Activation::sigmoid: return "sigmoid";
        case Activation::tanh: return "tanh";
        case Activation::linear: return "linear";
    }
    return "linear";
}

Activation activation_from_string(const std::string& name) {
    if (name == "relu") return Activation::relu;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "tanh") return Activation::tanh;
    if (name == "linear") return Activation::linear;
    throw ConfigError("unknown activation `" + name + "`");
}

}  // namespace swardcast::nn
