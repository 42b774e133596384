#pragma once

#include <cmath>
#include <string>

namespace swardcast::nn {

enum class Activation { relu, sigmoid, tanh, linear };

inline double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

inline double activate(Activation kind, double x) {
    switch (kind) {
        case Activation::relu: return x > 0.0 ? x : 0.0;
        case Activation::sigmoid: return sigmoid(x);
        case Activation::tanh: return std::tanh(x);
        case Activation::linear: return x;
    }
    return x;
}

/// Derivative w.r.t. the pre-activation, given both pre-activation and output.
inline double activate_derivative(Activation kind, double pre, double out) {
    switch (kind) {
        case Activation::relu: return pre > 0.0 ? 1.0 : 0.0;
        case Activation::sigmoid: return out * (1.0 - out);
        case Activation::tanh: return 1.0 - out * out;
        case Activation::linear: return 1.0;
    }
    return 1.0;
}

std::string to_string(Activation kind);
Activation activation_from_string(const std::string& name);

}  // namespace swardcast::nn
