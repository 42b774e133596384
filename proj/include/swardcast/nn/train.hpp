#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "swardcast/errors.hpp"
#include "swardcast/pipeline.hpp"

namespace swardcast::nn {

/// Per-epoch losses (normalized units), one entry per epoch.
struct TrainingTrace {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
};

struct TrainSettings {
    int epochs = 50;
    int batch_size = 32;
    double learning_rate = 0.01;
};

/**
 * Mini-batch gradient descent over sequential (unshuffled) batches. Fully
 * deterministic given the model's initial parameters.
 *
 * Throws DivergenceDetected when the train loss becomes non-finite or grows
 * past 100x its pre-training value.
 */
template <typename Model>
TrainingTrace train_model(Model& model, const WindowedDataset& train, const WindowedDataset& val,
                          const TrainSettings& settings) {
    if (settings.epochs < 1 || settings.batch_size < 1) {
        throw ConfigError("epochs and batch_size must be at least 1");
    }
    if (train.size() == 0 || val.size() == 0) {
        throw SeriesTooShort("training requires non-empty train and val windows");
    }

    const std::size_t n = train.size();
    const auto batch = static_cast<std::size_t>(settings.batch_size);
    const double baseline = model.batch_loss(train, 0, n);
    const double divergence_cap = 100.0 * std::max(baseline, 1e-12);

    TrainingTrace trace;
    trace.train_loss.reserve(static_cast<std::size_t>(settings.epochs));
    trace.val_loss.reserve(static_cast<std::size_t>(settings.epochs));

    std::vector<double> params = model.parameters();
    for (int epoch = 0; epoch < settings.epochs; ++epoch) {
        for (std::size_t begin = 0; begin < n; begin += batch) {
            const std::size_t end = std::min(begin + batch, n);
            std::vector<double> grad = model.batch_gradient(train, begin, end);
            for (std::size_t i = 0; i < params.size(); ++i) {
                params[i] -= settings.learning_rate * grad[i];
            }
            model.set_parameters(params);
        }
        const double train_loss = model.batch_loss(train, 0, n);
        const double val_loss = model.batch_loss(val, 0, val.size());
        if (!std::isfinite(train_loss) || !std::isfinite(val_loss) || train_loss > divergence_cap) {
            throw DivergenceDetected("loss " + std::to_string(train_loss) + " at epoch " +
                                     std::to_string(epoch + 1));
        }
        trace.train_loss.push_back(train_loss);
        trace.val_loss.push_back(val_loss);
    }
    return trace;
}

}  // namespace swardcast::nn
