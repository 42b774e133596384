#include "swardcast/nn/loss.hpp"

#include <string>

#include "swardcast/errors.hpp"

namespace swardcast::nn {

double mse_loss(std::span<const double> targets, std::span<const double> outputs) {
    if (targets.empty()) {
        throw EmptyInput("mse_loss inputs are empty");
    }
    if (targets.size() != outputs.size()) {
        throw LengthMismatch("targets has " + std::to_string(targets.size()) +
                             " values, outputs has " + std::to_string(outputs.size()));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        double e = targets[i] - outputs[i];
        sum += e * e;
    }
    return sum / static_cast<double>(targets.size());
}

}  // namespace swardcast::nn
