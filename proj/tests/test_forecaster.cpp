#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "swardcast/errors.hpp"
#include "swardcast/forecaster.hpp"
#include "swardcast/report.hpp"
#include "swardcast/timeseries.hpp"

using namespace swardcast;
using nlohmann::json;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name)
        : path((std::filesystem::temp_directory_path() / name).string()) {}
    ~TempFile() { std::remove(path.c_str()); }
};

std::string file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TimeSeries demo_series(std::size_t length = 260, std::uint64_t seed = 19) {
    SyntheticSpec spec;
    spec.length = length;
    spec.seed = seed;
    return generate_synthetic(spec);
}

}  // namespace

TEST_CASE("canonical_config fills defaults and rejects unknown keys") {
    json canon = canonical_config(ModelFamily::mlp, json{{"lag", 3}});
    CHECK(canon.at("lag") == 3);
    CHECK(canon.at("epochs") == 50);
    CHECK(canon.at("batch_size") == 32);
    CHECK(canon.at("layers") == json::array({10}));

    json tcn = canonical_config(ModelFamily::tcn, json::object());
    CHECK(tcn.at("epochs") == 30);

    CHECK_THROWS_AS(canonical_config(ModelFamily::mlp, json{{"nope", 1}}), ConfigError);
    CHECK_THROWS_AS(canonical_config(ModelFamily::arima, json{{"p", -1}}), ConfigError);
    CHECK_THROWS_AS(canonical_config(ModelFamily::tcn, json{{"dilations", {2, 4}}}), ConfigError);
}

TEST_CASE("config digest is stable and order-insensitive") {
    json a = {{"p", 2}, {"d", 1}, {"q", 2}};
    json b = {{"q", 2}, {"p", 2}, {"d", 1}};
    CHECK(config_digest(ModelFamily::arima, a) == config_digest(ModelFamily::arima, b));
    CHECK(config_digest(ModelFamily::arima, a) !=
          config_digest(ModelFamily::arima, json{{"p", 1}}));
    CHECK(config_digest(ModelFamily::arima, a).size() == 16);
}

TEST_CASE("fit_and_evaluate produces a full outcome for neural families") {
    json config = {{"layers", {5}}, {"epochs", 4}, {"lag", 2}, {"seed", 3}};
    FitOutcome outcome = fit_and_evaluate(ModelFamily::mlp, config, demo_series());
    CHECK(outcome.split_sizes.train == 156);
    CHECK(outcome.split_sizes.val == 52);
    CHECK(outcome.split_sizes.test == 52);
    CHECK(std::isfinite(outcome.val_report.rmse));
    CHECK(std::isfinite(outcome.test_report.rmse));
    CHECK(outcome.val_report.rmse >= outcome.val_report.mae);
    REQUIRE(outcome.trace.has_value());
    CHECK(outcome.trace->train_loss.size() == 4);
    CHECK(outcome.trace->val_loss.size() == 4);
    CHECK(outcome.forecaster.scaler.has_value());
    CHECK_FALSE(outcome.residuals.has_value());
    CHECK(outcome.runtime_seconds >= 0.0);
}

TEST_CASE("fit_and_evaluate produces residual diagnostics for arima") {
    json config = {{"p", 1}, {"d", 1}, {"q", 1}};
    FitOutcome outcome = fit_and_evaluate(ModelFamily::arima, config, demo_series());
    CHECK_FALSE(outcome.trace.has_value());
    REQUIRE(outcome.residuals.has_value());
    CHECK(outcome.residuals->n > 0);
    CHECK(std::isfinite(outcome.residuals->stddev));
    CHECK(std::isfinite(outcome.test_report.rmse));
}

TEST_CASE("fit_and_evaluate is bitwise deterministic") {
    json config = {{"layers", {4}}, {"epochs", 3}, {"lag", 2}, {"seed", 11}};
    for (ModelFamily family : {ModelFamily::mlp, ModelFamily::lstm, ModelFamily::gru}) {
        FitOutcome a = fit_and_evaluate(family, config, demo_series());
        FitOutcome b = fit_and_evaluate(family, config, demo_series());
        CHECK(a.val_report.rmse == b.val_report.rmse);
        CHECK(a.test_report.rmse == b.test_report.rmse);
        CHECK(a.test_report.mae == b.test_report.mae);
    }
}

TEST_CASE("model files roundtrip bit-exactly") {
    TempFile f("swardcast_model_roundtrip.bin");
    TempFile g("swardcast_model_roundtrip2.bin");
    json config = {{"layers", {4, 3}}, {"epochs", 3}, {"lag", 3}, {"seed", 5}};
    FitOutcome outcome = fit_and_evaluate(ModelFamily::gru, config, demo_series());
    outcome.forecaster.save(f.path);

    TrainedForecaster loaded = TrainedForecaster::load(f.path);
    CHECK(loaded.family == ModelFamily::gru);
    CHECK(loaded.config == outcome.forecaster.config);
    CHECK(loaded.scaler->min == outcome.forecaster.scaler->min);

    TimeSeries history = demo_series();
    CHECK(loaded.forecast(history, 3) == outcome.forecaster.forecast(history, 3));

    loaded.save(g.path);
    CHECK(file_bytes(f.path) == file_bytes(g.path));
}

TEST_CASE("arima model files restore the fitted parameters") {
    TempFile f("swardcast_model_arima.bin");
    json config = {{"p", 2}, {"d", 1}, {"q", 1}};
    FitOutcome outcome = fit_and_evaluate(ModelFamily::arima, config, demo_series());
    outcome.forecaster.save(f.path);
    TrainedForecaster loaded = TrainedForecaster::load(f.path);
    const ArimaModel& original = std::get<ArimaModel>(outcome.forecaster.model);
    const ArimaModel& restored = std::get<ArimaModel>(loaded.model);
    CHECK(restored.c == original.c);
    CHECK(restored.phi == original.phi);
    CHECK(restored.theta == original.theta);
    TimeSeries history = demo_series();
    CHECK(loaded.forecast(history, 2) == outcome.forecaster.forecast(history, 2));
}

TEST_CASE("load rejects foreign files") {
    TempFile f("swardcast_model_bogus.bin");
    std::ofstream(f.path) << "definitely not a model";
    CHECK_THROWS_AS(TrainedForecaster::load(f.path), IoError);
}

TEST_CASE("random-walk arima forecaster repeats the last observation") {
    TrainedForecaster f;
    f.family = ModelFamily::arima;
    f.config = canonical_config(ModelFamily::arima, json{{"p", 0}, {"d", 1}, {"q", 0}});
    ArimaModel rw;
    rw.order = {0, 1, 0};
    f.model = rw;

    TimeSeries history;
    history.values = {3.0, 5.0, 8.0};
    CHECK(f.forecast(history, 3) == std::vector<double>{8.0, 8.0, 8.0});
}

TEST_CASE("zero-parameter mlp forecasts the denormalized zero (train minimum)") {
    json config = {{"layers", {3}}, {"epochs", 1}, {"lag", 2}, {"seed", 2}};
    TrainedForecaster f;
    f.family = ModelFamily::mlp;
    f.config = canonical_config(ModelFamily::mlp, config);
    auto model = nn::MlpModel::init(mlp_config_from_config(f.config));
    model.set_parameters(std::vector<double>(model.parameter_count(), 0.0));
    f.model = std::move(model);
    f.scaler = MinMaxParams{12.5, 80.0};

    TimeSeries history;
    history.values = {20.0, 30.0, 40.0};
    std::vector<double> out = f.forecast(history, 2);
    CHECK(out[0] == doctest::Approx(12.5));
    CHECK(out[1] == doctest::Approx(12.5));
}

TEST_CASE("one-step forecast equals the evaluation-path prediction at series end") {
    json config = {{"layers", {5}}, {"epochs", 5}, {"lag", 3}, {"seed", 17}};
    TimeSeries series = demo_series();
    FitOutcome outcome = fit_and_evaluate(ModelFamily::mlp, config, series);

    const TrainedForecaster& f = outcome.forecaster;
    std::vector<double> window(series.values.end() - 3, series.values.end());
    for (double& v : window) v = transform_value(v, *f.scaler);
    const double direct =
        inverse_transform_value(std::get<nn::MlpModel>(f.model).predict(window), *f.scaler);
    CHECK(f.forecast(series, 1).front() == doctest::Approx(direct).epsilon(1e-12));
    CHECK(f.predict_next(series) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("forecast validates history length") {
    json config = {{"layers", {3}}, {"epochs", 1}, {"lag", 4}, {"seed", 2}};
    TrainedForecaster f;
    f.family = ModelFamily::mlp;
    f.config = canonical_config(ModelFamily::mlp, config);
    auto model = nn::MlpModel::init(mlp_config_from_config(f.config));
    f.model = std::move(model);
    f.scaler = MinMaxParams{0.0, 1.0};
    TimeSeries short_history;
    short_history.values = {1.0, 2.0};
    CHECK_THROWS_AS(f.forecast(short_history, 1), InsufficientHistory);
}

TEST_CASE("reported val metrics equal a manual recomputation from the model") {
    json config = {{"layers", {5}}, {"epochs", 4}, {"lag", 2}, {"seed", 23}};
    TimeSeries series = demo_series();
    FitOutcome outcome = fit_and_evaluate(ModelFamily::mlp, config, series);

    DatasetSplits splits = split(series, {});
    const MinMaxParams scaler = *outcome.forecaster.scaler;
    WindowedDataset wval = window(transform(splits.val, scaler), 2);
    const auto& model = std::get<nn::MlpModel>(outcome.forecaster.model);
    std::vector<double> preds;
    for (const auto& row : wval.inputs) {
        preds.push_back(inverse_transform_value(model.predict(row), scaler));
    }
    const std::vector<double> observed = window(splits.val, 2).targets;
    CHECK(rmse(observed, preds) == outcome.val_report.rmse);  // bitwise
    CHECK(mae(observed, preds) == outcome.val_report.mae);
}

TEST_CASE("train report JSON carries the schema") {
    json config = {{"layers", {4}}, {"epochs", 2}, {"lag", 2}, {"seed", 3}};
    FitOutcome outcome = fit_and_evaluate(ModelFamily::mlp, config, demo_series());
    RunManifest manifest;
    manifest.command = "train --model mlp";
    manifest.seed = 3;
    manifest.config_digest = outcome.val_report.config_digest;
    json doc = train_report_json(outcome, manifest);
    CHECK(doc.at("schema_version") == kReportSchemaVersion);
    CHECK(doc.at("model") == "mlp");
    CHECK(doc.at("splits").at("train") == 156);
    CHECK(doc.at("metrics").at("test").contains("rmse"));
    CHECK(doc.at("loss_curves").at("train").size() == 2);
    CHECK(doc.at("manifest").at("toolkit_version") == kToolkitVersion);
}
