#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "swardcast/pipeline.hpp"

namespace swardcast {

/// Root mean squared error, sqrt((1/N) * sum((y_i - x_i)^2)).
double rmse(std::span<const double> observed, std::span<const double> predicted);

/// Mean absolute error, (1/N) * sum(|y_i - x_i|).
double mae(std::span<const double> observed, std::span<const double> predicted);

/// Metrics for one (model, config) run, in original data units.
struct EvalReport {
    double rmse = 0.0;
    double mae = 0.0;
    double runtime_seconds = 0.0;
    std::size_t n = 0;
    std::string model_tag;
    std::string config_digest;
};

EvalReport evaluate(std::span<const double> observed, std::span<const double> predicted,
                    double runtime_seconds, std::string model_tag, std::string config_digest);

/// Naive forecaster: predicts each target as the last value of its window.
std::vector<double> persistence_predictions(const WindowedDataset& dataset);

}  // namespace swardcast
