#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "swardcast/forecaster.hpp"
#include "swardcast/metrics.hpp"
#include "swardcast/pipeline.hpp"
#include "swardcast/timeseries.hpp"

namespace swardcast {

struct GridAxis {
    std::string name;
    std::vector<nlohmann::json> values;
};

/// Named hyperparameter axes for one family; configs are the cartesian product.
struct GridSpec {
    ModelFamily family = ModelFamily::arima;
    std::vector<GridAxis> axes;
    std::vector<std::string> notes;         // recorded verbatim in reports
    nlohmann::json reference_best;          // informational, never asserted

    std::size_t size() const;
};

/// Built-in preset grid for a family (the `paper` grid name on the CLI).
GridSpec paper_grid(ModelFamily family);

/// Extended 4x4x4 ARIMA grid (the `paper64` grid name); not the reference axes.
GridSpec arima_grid64();

/// Grid from a JSON document {"family": ..., "axes": {name: [values...]}}.
GridSpec grid_from_json(const nlohmann::json& doc);

/// Full cartesian product in deterministic lexicographic order
/// (first axis slowest, last axis fastest).
std::vector<nlohmann::json> enumerate(const GridSpec& grid);

struct GridRun {
    nlohmann::json config;       // canonical, seed included
    std::string status;          // "ok" or the failure reason
    double val_rmse = 0.0;
    double val_mae = 0.0;
    double runtime_seconds = 0.0;
    int layers = 0;              // aggregate key; 0 when not applicable
    int lag = 0;

    bool ok() const { return status == "ok"; }
};

enum class AggregateAxis { layers, lag };

/// Mean val RMSE over finite runs per axis value; values whose runs all
/// failed are absent.
std::map<int, double> aggregate_mean_val_rmse(std::span<const GridRun> runs, AggregateAxis axis);

/// Failed-run counts per axis value.
std::map<int, std::size_t> aggregate_failures(std::span<const GridRun> runs, AggregateAxis axis);

struct GridSearchResult {
    ModelFamily family = ModelFamily::arima;
    std::vector<std::string> notes;
    nlohmann::json reference_best;
    std::vector<GridRun> runs;
    std::optional<std::size_t> best_index;  // argmin of finite val RMSE
    EvalReport best_val;
    EvalReport best_test;                   // winner re-evaluated on the test split
    std::map<int, double> mean_val_rmse_by_layers;
    std::map<int, double> mean_val_rmse_by_lag;
    std::map<int, std::size_t> failures_by_layers;
    std::map<int, std::size_t> failures_by_lag;
};

struct GridRunOptions {
    std::uint64_t seed = 42;     // shared across every config
    int workers = 1;
    SplitSpec split_spec = {};
};

/**
 * Trains every config on the train split and scores it on the validation
 * split (original units). Failures are recorded with their reason and
 * excluded from the winner. Result content is independent of worker count
 * (timing fields aside). Throws AllRunsFailed when nothing converged.
 */
GridSearchResult run_grid(const GridSpec& grid, const TimeSeries& series,
                          const GridRunOptions& options);

}  // namespace swardcast
