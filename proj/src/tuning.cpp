#include "swardcast/tuning.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "swardcast/errors.hpp"

namespace swardcast {

using nlohmann::json;

std::size_t GridSpec::size() const {
    std::size_t product = 1;
    for (const auto& axis : axes) {
        product *= axis.values.size();
    }
    return axes.empty() ? 0 : product;
}

namespace {

std::vector<json> to_values(std::initializer_list<json> values) {
    return std::vector<json>(values);
}

// Hidden-layer architectures: widths {5, 10} at depths 1..3 (14 in total).
std::vector<json> default_architectures() {
    const int widths[] = {5, 10};
    std::vector<json> out;
    for (int a : widths) {
        out.push_back(json::array({a}));
    }
    for (int a : widths) {
        for (int b : widths) {
            out.push_back(json::array({a, b}));
        }
    }
    for (int a : widths) {
        for (int b : widths) {
            for (int c : widths) {
                out.push_back(json::array({a, b, c}));
            }
        }
    }
    return out;
}

GridSpec neural_dense_grid(ModelFamily family) {
    GridSpec grid;
    grid.family = family;
    grid.axes.push_back({"layers", default_architectures()});
    grid.axes.push_back({"batch_size", to_values({32, 64})});
    grid.axes.push_back({"lag", to_values({2, 3, 4})});
    grid.notes.push_back(
        "default grid: hidden widths {5,10} at depths 1-3 (14 architectures) x batch {32,64} x "
        "lag {2,3,4} = 84 configurations; the reference methodology reports 108 combinations "
        "for this family without an enumerable width set");
    return grid;
}

}  // namespace

GridSpec paper_grid(ModelFamily family) {
    GridSpec grid;
    switch (family) {
        case ModelFamily::arima:
            grid.family = family;
            grid.axes.push_back({"p", to_values({1, 2, 4})});
            grid.axes.push_back({"d", to_values({1, 2, 3})});
            grid.axes.push_back({"q", to_values({1, 2, 4})});
            grid.notes.push_back(
                "grid `paper` enumerates the 27 (p,d,q) combinations of axes "
                "{1,2,4}x{1,2,3}x{1,2,4}; the reference methodology reports 64 models for these "
                "axes (see grid `paper64` for an extended 4x4x4 sweep)");
            grid.reference_best = {{"p", 2}, {"d", 1}, {"q", 2}};
            break;
        case ModelFamily::lstm:
        case ModelFamily::gru:
            grid = neural_dense_grid(family);
            grid.reference_best = {{"layers", json::array({10})}, {"lag", 3}, {"batch_size", 32}};
            break;
        case ModelFamily::mlp:
            grid = neural_dense_grid(family);
            grid.reference_best = {{"layers", json::array({10})}, {"lag", 2}, {"batch_size", 32}};
            break;
        case ModelFamily::tcn:
            grid.family = family;
            grid.axes.push_back({"stacks", to_values({1, 2, 3})});
            grid.axes.push_back({"filters", to_values({16, 32, 64})});
            grid.axes.push_back({"kernel_size", to_values({2, 3, 4})});
            grid.axes.push_back({"blocks", to_values({2, 3, 4})});
            grid.axes.push_back(
                {"dilations",
                 to_values({json::array({1, 2, 4, 8, 16}), json::array({1, 3, 6, 12, 24})})});
            grid.axes.push_back({"lag", to_values({2, 3, 4})});
            grid.reference_best = {{"stacks", 1},      {"filters", 64},
                                   {"kernel_size", 4}, {"blocks", 3},
                                   {"dilations", json::array({1, 3, 6, 12, 24})},
                                   {"lag", 2}};
            break;
    }
    return grid;
}

GridSpec arima_grid64() {
    GridSpec grid;
    grid.family = ModelFamily::arima;
    grid.axes.push_back({"p", to_values({1, 2, 3, 4})});
    grid.axes.push_back({"d", to_values({0, 1, 2, 3})});
    grid.axes.push_back({"q", to_values({1, 2, 3, 4})});
    grid.notes.push_back(
        "grid `paper64`: extended {1,2,3,4}x{0,1,2,3}x{1,2,3,4} sweep of 64 models; these are "
        "not the reference axes");
    return grid;
}

GridSpec grid_from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("family") || !doc.contains("axes")) {
        throw ConfigError("grid file must be an object with `family` and `axes`");
    }
    GridSpec grid;
    grid.family = family_from_string(doc.at("family").get<std::string>());
    const auto& axes = doc.at("axes");
    if (!axes.is_object() || axes.empty()) {
        throw ConfigError("grid `axes` must be a non-empty object of value arrays");
    }
    for (auto it = axes.begin(); it != axes.end(); ++it) {
        if (!it.value().is_array() || it.value().empty()) {
            throw ConfigError("grid axis `" + it.key() + "` must be a non-empty array");
        }
        GridAxis axis;
        axis.name = it.key();
        for (const auto& v : it.value()) {
            axis.values.push_back(v);
        }
        grid.axes.push_back(std::move(axis));
    }
    if (doc.contains("notes")) {
        for (const auto& note : doc.at("notes")) {
            grid.notes.push_back(note.get<std::string>());
        }
    }
    return grid;
}

std::vector<json> enumerate(const GridSpec& grid) {
    if (grid.axes.empty()) {
        throw ConfigError("grid has no axes");
    }
    for (const auto& axis : grid.axes) {
        if (axis.values.empty()) {
            throw ConfigError("grid axis `" + axis.name + "` is empty");
        }
    }
    std::vector<json> configs;
    configs.reserve(grid.size());
    std::vector<std::size_t> index(grid.axes.size(), 0);
    while (true) {
        json config;
        for (std::size_t a = 0; a < grid.axes.size(); ++a) {
            config[grid.axes[a].name] = grid.axes[a].values[index[a]];
        }
        configs.push_back(std::move(config));
        // Odometer increment, last axis fastest.
        std::size_t a = grid.axes.size();
        while (a-- > 0) {
            if (++index[a] < grid.axes[a].values.size()) {
                break;
            }
            index[a] = 0;
            if (a == 0) {
                return configs;
            }
        }
    }
}

namespace {

int layer_count(ModelFamily family, const json& canonical) {
    switch (family) {
        case ModelFamily::mlp:
        case ModelFamily::lstm:
        case ModelFamily::gru:
            return static_cast<int>(canonical.at("layers").size());
        case ModelFamily::tcn:
            return canonical.at("stacks").get<int>();
        case ModelFamily::arima:
            return 0;
    }
    return 0;
}

int lag_of(ModelFamily family, const json& canonical) {
    if (family == ModelFamily::arima) {
        return 0;
    }
    return canonical.at("lag").get<int>();
}

std::map<int, double> means_by_key(std::span<const GridRun> runs, bool by_layers) {
    std::map<int, double> sums;
    std::map<int, std::size_t> counts;
    for (const auto& run : runs) {
        if (!run.ok() || !std::isfinite(run.val_rmse)) {
            continue;
        }
        const int key = by_layers ? run.layers : run.lag;
        sums[key] += run.val_rmse;
        counts[key] += 1;
    }
    std::map<int, double> means;
    for (const auto& [key, sum] : sums) {
        means[key] = sum / static_cast<double>(counts[key]);
    }
    return means;
}

}  // namespace

std::map<int, double> aggregate_mean_val_rmse(std::span<const GridRun> runs, AggregateAxis axis) {
    return means_by_key(runs, axis == AggregateAxis::layers);
}

std::map<int, std::size_t> aggregate_failures(std::span<const GridRun> runs, AggregateAxis axis) {
    std::map<int, std::size_t> failures;
    for (const auto& run : runs) {
        if (!run.ok()) {
            const int key = axis == AggregateAxis::layers ? run.layers : run.lag;
            failures[key] += 1;
        }
    }
    return failures;
}

GridSearchResult run_grid(const GridSpec& grid, const TimeSeries& series,
                          const GridRunOptions& options) {
    const std::vector<json> configs = enumerate(grid);

    GridSearchResult result;
    result.family = grid.family;
    result.notes = grid.notes;
    result.reference_best = grid.reference_best;
    result.runs.resize(configs.size());

    // Pre-resolve canonical configs serially so config errors surface with
    // their index and the workers only ever run valid configs.
    std::vector<json> canonicals(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) {
        json config = configs[i];
        config["seed"] = options.seed;
        if (grid.family == ModelFamily::arima) {
            config.erase("seed");  // arima estimation has no random state
        }
        canonicals[i] = canonical_config(grid.family, config);
        result.runs[i].config = canonicals[i];
        result.runs[i].layers = layer_count(grid.family, canonicals[i]);
        result.runs[i].lag = lag_of(grid.family, canonicals[i]);
    }

    // Trained models are dropped after scoring; only their reports are kept.
    std::vector<EvalReport> val_reports(configs.size());
    std::vector<EvalReport> test_reports(configs.size());

    const int workers = std::max(1, options.workers);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= configs.size()) {
                return;
            }
            try {
                FitOutcome outcome =
                    fit_and_evaluate(grid.family, canonicals[i], series, options.split_spec);
                val_reports[i] = outcome.val_report;
                test_reports[i] = outcome.test_report;
                result.runs[i].status = "ok";
                result.runs[i].val_rmse = outcome.val_report.rmse;
                result.runs[i].val_mae = outcome.val_report.mae;
                result.runs[i].runtime_seconds = outcome.runtime_seconds;
            } catch (const std::exception& e) {
                result.runs[i].status = e.what();
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    double best_rmse = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < result.runs.size(); ++i) {
        if (result.runs[i].ok() && std::isfinite(result.runs[i].val_rmse) &&
            result.runs[i].val_rmse < best_rmse) {
            best_rmse = result.runs[i].val_rmse;
            result.best_index = i;
        }
    }
    if (!result.best_index) {
        throw AllRunsFailed("no grid configuration produced a finite validation RMSE");
    }
    result.best_val = val_reports[*result.best_index];
    result.best_test = test_reports[*result.best_index];

    result.mean_val_rmse_by_layers = aggregate_mean_val_rmse(result.runs, AggregateAxis::layers);
    result.mean_val_rmse_by_lag = aggregate_mean_val_rmse(result.runs, AggregateAxis::lag);
    result.failures_by_layers = aggregate_failures(result.runs, AggregateAxis::layers);
    result.failures_by_lag = aggregate_failures(result.runs, AggregateAxis::lag);
    return result;
}

}  // namespace swardcast
