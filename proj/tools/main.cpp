#include <cstdio>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "swardcast/digest.hpp"
#include "swardcast/errors.hpp"
#include "swardcast/forecaster.hpp"
#include "swardcast/report.hpp"
#include "swardcast/timeseries.hpp"
#include "swardcast/tuning.hpp"

namespace {

using nlohmann::json;
using namespace swardcast;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("SWARDCAST_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ConfigError("SWARDCAST_SEED must be an unsigned integer");
        }
    }
    return 42;
}

/// Accepts inline JSON or `@path/to/config.json`.
json parse_config_arg(const std::string& arg) {
    if (arg.empty()) {
        return json::object();
    }
    if (arg.front() == '@') {
        return read_json(arg.substr(1));
    }
    try {
        return json::parse(arg);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid config JSON: ") + e.what());
    }
}

struct GenerateArgs {
    std::size_t length = 1757;
    double period = 52.0;
    double amplitude = 40.0;
    double trend = 0.01;
    double noise = 5.0;
    double offset = 60.0;
    std::optional<std::uint64_t> seed;
    std::string out;
};

int cmd_generate(const GenerateArgs& args) {
    if (args.length < 50) {
        throw ConfigError("--length must be at least 50");
    }
    SyntheticSpec spec;
    spec.length = args.length;
    spec.period = args.period;
    spec.amplitude = args.amplitude;
    spec.trend = args.trend;
    spec.noise = args.noise;
    spec.offset = args.offset;
    spec.seed = args.seed.value_or(default_seed());
    TimeSeries series = generate_synthetic(spec);
    save_csv(series, args.out);
    std::printf("wrote %zu rows to %s (seed %llu)\n", series.size(), args.out.c_str(),
                static_cast<unsigned long long>(spec.seed));
    return kExitOk;
}

struct TrainArgs {
    std::string model;
    std::string data;
    std::string config_arg;
    std::optional<std::uint64_t> seed;
    std::string out_model;
    std::string report_path;
};

int cmd_train(const TrainArgs& args) {
    const ModelFamily family = family_from_string(args.model);
    json config = parse_config_arg(args.config_arg);
    if (family != ModelFamily::arima) {
        if (args.seed) {
            config["seed"] = *args.seed;
        } else if (!config.contains("seed")) {
            config["seed"] = default_seed();
        }
    }

    RunManifest manifest;
    manifest.command = "train --model " + args.model;
    manifest.data_descriptor = args.data;
    manifest.seed = args.seed ? *args.seed
                              : (config.contains("seed") ? config["seed"].get<std::uint64_t>() : 0);
    manifest.config_digest = config_digest(family, config);
    manifest.started_at = iso8601_utc_now();

    const TimeSeries series = load_csv(args.data);
    FitOutcome outcome = fit_and_evaluate(family, config, series);
    manifest.finished_at = iso8601_utc_now();

    if (outcome.stationary_warning) {
        std::fprintf(stderr, "warning: fitted parameters lie outside the unit-root region\n");
    }
    if (!args.out_model.empty()) {
        outcome.forecaster.save(args.out_model);
    }
    if (!args.report_path.empty()) {
        write_json(train_report_json(outcome, manifest), args.report_path);
    }
    std::printf("%s val rmse=%.4f mae=%.4f | test rmse=%.4f mae=%.4f | %.2fs\n",
                args.model.c_str(), outcome.val_report.rmse, outcome.val_report.mae,
                outcome.test_report.rmse, outcome.test_report.mae, outcome.runtime_seconds);
    return kExitOk;
}

struct GridArgs {
    std::string model;
    std::string grid = "paper";
    std::string data;
    std::optional<std::uint64_t> seed;
    std::string report_path;
    int workers = 1;
};

int cmd_gridsearch(const GridArgs& args) {
    const ModelFamily family = family_from_string(args.model);
    GridSpec grid;
    if (args.grid == "paper") {
        grid = paper_grid(family);
    } else if (args.grid == "paper64") {
        if (family != ModelFamily::arima) {
            throw ConfigError("grid `paper64` exists only for arima");
        }
        grid = arima_grid64();
    } else {
        grid = grid_from_json(read_json(args.grid));
        if (grid.family != family) {
            throw ConfigError("grid file family does not match --model");
        }
    }

    GridRunOptions options;
    options.seed = args.seed.value_or(default_seed());
    options.workers = args.workers;

    RunManifest manifest;
    manifest.command = "gridsearch --model " + args.model + " --grid " + args.grid;
    manifest.data_descriptor = args.data;
    manifest.seed = options.seed;
    {
        json axes = json::object();
        for (const auto& axis : grid.axes) {
            axes[axis.name] = axis.values;
        }
        manifest.config_digest = text_digest(axes.dump());
    }
    manifest.started_at = iso8601_utc_now();

    const TimeSeries series = load_csv(args.data);
    GridSearchResult result = run_grid(grid, series, options);
    manifest.finished_at = iso8601_utc_now();

    if (!args.report_path.empty()) {
        write_json(grid_report_json(result, manifest), args.report_path);
    }
    std::printf("%zu runs; best #%zu val rmse=%.4f | test rmse=%.4f mae=%.4f\n",
                result.runs.size(), *result.best_index, result.best_val.rmse,
                result.best_test.rmse, result.best_test.mae);
    return kExitOk;
}

struct ForecastArgs {
    std::string model_file;
    std::string data;
    int steps = 1;
    std::string report_path;
};

int cmd_forecast(const ForecastArgs& args) {
    TrainedForecaster forecaster = TrainedForecaster::load(args.model_file);
    const TimeSeries history = load_csv(args.data);
    if (history.size() < forecaster.input_lag()) {
        throw ConfigError("data supplies " + std::to_string(history.size()) +
                          " values but the model needs " +
                          std::to_string(forecaster.input_lag()));
    }
    const std::vector<double> forecasts = forecaster.forecast(history, args.steps);

    if (!args.report_path.empty()) {
        json doc;
        doc["schema_version"] = kReportSchemaVersion;
        doc["model"] = to_string(forecaster.family);
        doc["config"] = forecaster.config;
        doc["steps"] = args.steps;
        doc["forecasts"] = forecasts;
        write_json(doc, args.report_path);
    }
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        std::printf("t+%zu %.6f\n", i + 1, forecasts[i]);
    }
    return kExitOk;
}

struct LossCurvesArgs {
    std::string report_path;
    std::string out;
};

int cmd_losscurves(const LossCurvesArgs& args) {
    const json doc = read_json(args.report_path);
    if (!doc.contains("loss_curves")) {
        throw ConfigError("report has no loss curves (only neural families record them)");
    }
    const auto train = doc["loss_curves"]["train"].get<std::vector<double>>();
    const auto val = doc["loss_curves"]["val"].get<std::vector<double>>();
    if (train.size() != val.size()) {
        throw ConfigError("malformed report: loss curve lengths differ");
    }
    std::FILE* out = std::fopen(args.out.c_str(), "w");
    if (out == nullptr) {
        throw IoError("cannot write " + args.out);
    }
    std::fprintf(out, "epoch,train_loss,val_loss\n");
    for (std::size_t i = 0; i < train.size(); ++i) {
        std::fprintf(out, "%zu,%.12g,%.12g\n", i + 1, train[i], val[i]);
    }
    std::fclose(out);
    std::printf("wrote %zu epochs to %s\n", train.size(), args.out.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"swardcast: univariate time-series forecasting toolkit"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Write a seeded synthetic series as CSV");
    generate->add_option("--length", gen.length, "Series length (>= 50)");
    generate->add_option("--period", gen.period, "Seasonal period in steps");
    generate->add_option("--amplitude", gen.amplitude, "Seasonal amplitude");
    generate->add_option("--trend", gen.trend, "Linear trend per step");
    generate->add_option("--noise", gen.noise, "Gaussian noise sigma");
    generate->add_option("--offset", gen.offset, "Mean level");
    generate->add_option("--seed", gen.seed, "Generator seed");
    generate->add_option("--out", gen.out, "Output CSV path")->required();

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Fit one model and report val/test metrics");
    train_cmd->add_option("--model", train.model, "arima|lstm|gru|mlp|tcn")->required();
    train_cmd->add_option("--data", train.data, "Input CSV path")->required();
    train_cmd->add_option("--config", train.config_arg, "Inline JSON or @file");
    train_cmd->add_option("--seed", train.seed, "Seed override");
    train_cmd->add_option("--out-model", train.out_model, "Model artifact path");
    train_cmd->add_option("--report", train.report_path, "JSON report path");

    GridArgs grid;
    auto* grid_cmd = app.add_subcommand("gridsearch", "Run a hyperparameter grid search");
    grid_cmd->add_option("--model", grid.model, "arima|lstm|gru|mlp|tcn")->required();
    grid_cmd->add_option("--grid", grid.grid, "paper, paper64 (arima) or a grid JSON path");
    grid_cmd->add_option("--data", grid.data, "Input CSV path")->required();
    grid_cmd->add_option("--seed", grid.seed, "Seed shared across configs");
    grid_cmd->add_option("--report", grid.report_path, "JSON report path");
    grid_cmd->add_option("--workers", grid.workers, "Parallel workers");

    ForecastArgs fc;
    auto* fc_cmd = app.add_subcommand("forecast", "Recursive multi-step forecast from a model file");
    fc_cmd->add_option("--model-file", fc.model_file, "Trained model artifact")->required();
    fc_cmd->add_option("--data", fc.data, "History CSV path")->required();
    fc_cmd->add_option("--steps", fc.steps, "Number of steps");
    fc_cmd->add_option("--report", fc.report_path, "JSON report path");

    LossCurvesArgs lc;
    auto* lc_cmd = app.add_subcommand("losscurves", "Export loss curves from a training report");
    lc_cmd->add_option("--report", lc.report_path, "Training report JSON")->required();
    lc_cmd->add_option("--out", lc.out, "Output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (generate->parsed()) return cmd_generate(gen);
        if (train_cmd->parsed()) return cmd_train(train);
        if (grid_cmd->parsed()) return cmd_gridsearch(grid);
        if (fc_cmd->parsed()) return cmd_forecast(fc);
        if (lc_cmd->parsed()) return cmd_losscurves(lc);
    } catch (const NonConvergence& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    } catch (const DivergenceDetected& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    } catch (const AllRunsFailed& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
