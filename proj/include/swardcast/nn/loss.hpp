#pragma once

#include <span>

namespace swardcast::nn {

/// Mean squared error, (1/N) * sum((y_i - o_i)^2). Throws LengthMismatch / EmptyInput.
double mse_loss(std::span<const double> targets, std::span<const double> outputs);

}  // namespace swardcast::nn
