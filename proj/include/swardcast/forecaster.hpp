#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "swardcast/arima.hpp"
#include "swardcast/metrics.hpp"
#include "swardcast/nn/mlp.hpp"
#include "swardcast/nn/recurrent.hpp"
#include "swardcast/nn/tcn.hpp"
#include "swardcast/nn/train.hpp"
#include "swardcast/pipeline.hpp"

namespace swardcast {

enum class ModelFamily { arima, lstm, gru, mlp, tcn };

std::string to_string(ModelFamily family);
ModelFamily family_from_string(const std::string& name);

/// Parses a family config, applying defaults and rejecting unknown keys, and
/// returns the fully materialized form. Throws ConfigError.
nlohmann::json canonical_config(ModelFamily family, const nlohmann::json& config);

ArimaOrder arima_order_from_config(const nlohmann::json& config);
nn::MlpConfig mlp_config_from_config(const nlohmann::json& config);
nn::RnnConfig rnn_config_from_config(ModelFamily family, const nlohmann::json& config);
nn::TcnConfig tcn_config_from_config(const nlohmann::json& config);

std::string config_digest(ModelFamily family, const nlohmann::json& config);

/**
 * A fitted model of one family together with the normalization parameters it
 * was trained under (absent for ARIMA, which works in original units).
 */
struct TrainedForecaster {
    ModelFamily family = ModelFamily::arima;
    nlohmann::json config;
    std::optional<MinMaxParams> scaler;
    std::variant<ArimaModel, nn::MlpModel, nn::RnnModel, nn::TcnModel> model;

    /// Trailing history values required before forecasting.
    std::size_t input_lag() const;

    /// Recursive multi-step forecast in original units; predictions are fed
    /// back as inputs. Throws InsufficientHistory on a lag shortfall.
    std::vector<double> forecast(const TimeSeries& history, int steps) const;

    /// One-step prediction from the trailing window of `history`.
    double predict_next(const TimeSeries& history) const;

    /// Versioned binary dump; loading restores the model bit-exactly.
    void save(const std::string& path) const;
    static TrainedForecaster load(const std::string& path);
};

struct SplitSizes {
    std::size_t train = 0;
    std::size_t val = 0;
    std::size_t test = 0;
};

struct ResidualSummary {
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t n = 0;
};

/// Everything one train/evaluate run produces.
struct FitOutcome {
    TrainedForecaster forecaster;
    EvalReport val_report;
    EvalReport test_report;
    std::optional<nn::TrainingTrace> trace;  // neural families only
    std::optional<ResidualSummary> residuals;  // arima only
    SplitSizes split_sizes;
    double runtime_seconds = 0.0;
    bool stationary_warning = false;  // arima fitted outside the unit-root region
};

/**
 * Runs the full protocol for one configuration: chronological split,
 * train-only min-max normalization (neural families), per-split windowing,
 * training, and val/test evaluation in original units. Deterministic for a
 * fixed config (including its seed).
 */
FitOutcome fit_and_evaluate(ModelFamily family, const nlohmann::json& config,
                            const TimeSeries& series, const SplitSpec& split_spec = {});

}  // namespace swardcast
