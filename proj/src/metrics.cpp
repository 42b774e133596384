#include "swardcast/metrics.hpp"

#include <cmath>
#include <utility>

#include "swardcast/errors.hpp"

namespace swardcast {

namespace {

void check_pair(std::span<const double> observed, std::span<const double> predicted) {
    if (observed.empty()) {
        throw EmptyInput("metric inputs are empty");
    }
    if (observed.size() != predicted.size()) {
        throw LengthMismatch("observed has " + std::to_string(observed.size()) +
                             " values, predicted has " + std::to_string(predicted.size()));
    }
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (!std::isfinite(observed[i]) || !std::isfinite(predicted[i])) {
            throw ConfigError("metric inputs must be finite");
        }
    }
}

}  // namespace

double rmse(std::span<const double> observed, std::span<const double> predicted) {
    check_pair(observed, predicted);
    double sum = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double e = observed[i] - predicted[i];
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(observed.size()));
}

double mae(std::span<const double> observed, std::span<const double> predicted) {
    check_pair(observed, predicted);
    double sum = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        sum += std::abs(observed[i] - predicted[i]);
    }
    return sum / static_cast<double>(observed.size());
}

EvalReport evaluate(std::span<const double> observed, std::span<const double> predicted,
                    double runtime_seconds, std::string model_tag, std::string config_digest) {
    EvalReport report;
    report.rmse = rmse(observed, predicted);
    report.mae = mae(observed, predicted);
    report.runtime_seconds = runtime_seconds;
    report.n = observed.size();
    report.model_tag = std::move(model_tag);
    report.config_digest = std::move(config_digest);
    // Quadratic mean dominates arithmetic mean; allow rounding slack only.
    if (report.rmse < report.mae * (1.0 - 1e-12) - 1e-15) {
        throw Error("rmse < mae; metric computation is inconsistent");
    }
    return report;
}

std::vector<double> persistence_predictions(const WindowedDataset& dataset) {
    std::vector<double> out;
    out.reserve(dataset.size());
    for (const auto& row : dataset.inputs) {
        out.push_back(row.back());
    }
    return out;
}

}  // namespace swardcast
