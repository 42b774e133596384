#include "swardcast/report.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "swardcast/errors.hpp"

namespace swardcast {

using nlohmann::json;

std::string iso8601_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json to_json(const RunManifest& manifest) {
    return {{"command", manifest.command},
            {"data", manifest.data_descriptor},
            {"seed", manifest.seed},
            {"config_digest", manifest.config_digest},
            {"toolkit_version", kToolkitVersion},
            {"started_at", manifest.started_at},
            {"finished_at", manifest.finished_at}};
}

json to_json(const EvalReport& report) {
    return {{"rmse", report.rmse}, {"mae", report.mae}, {"n", report.n}};
}

json to_json(const nn::TrainingTrace& trace) {
    return {{"train", trace.train_loss}, {"val", trace.val_loss}};
}

json train_report_json(const FitOutcome& outcome, const RunManifest& manifest) {
    json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["manifest"] = to_json(manifest);
    doc["model"] = to_string(outcome.forecaster.family);
    doc["config"] = outcome.forecaster.config;
    doc["splits"] = {{"train", outcome.split_sizes.train},
                     {"val", outcome.split_sizes.val},
                     {"test", outcome.split_sizes.test}};
    doc["metrics"] = {{"val", to_json(outcome.val_report)}, {"test", to_json(outcome.test_report)}};
    doc["runtime_seconds"] = outcome.runtime_seconds;
    if (outcome.trace) {
        doc["loss_curves"] = to_json(*outcome.trace);
    }
    if (outcome.residuals) {
        doc["residuals"] = {{"mean", outcome.residuals->mean},
                            {"stddev", outcome.residuals->stddev},
                            {"n", outcome.residuals->n}};
    }
    if (outcome.stationary_warning) {
        doc["warnings"] = json::array({"fitted parameters lie outside the unit-root region"});
    }
    return doc;
}

namespace {

// Key 0 marks runs without the axis (arima has neither layers nor lag).
json int_key_map(const std::map<int, double>& m) {
    json out = json::object();
    for (const auto& [key, value] : m) {
        if (key > 0) out[std::to_string(key)] = value;
    }
    return out;
}

json int_key_map(const std::map<int, std::size_t>& m) {
    json out = json::object();
    for (const auto& [key, value] : m) {
        if (key > 0) out[std::to_string(key)] = value;
    }
    return out;
}

}  // namespace

json grid_report_json(const GridSearchResult& result, const RunManifest& manifest) {
    json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["manifest"] = to_json(manifest);
    doc["model"] = to_string(result.family);

    json runs = json::array();
    for (const auto& run : result.runs) {
        json row;
        row["config"] = run.config;
        row["status"] = run.status;
        if (run.ok()) {
            row["val_rmse"] = run.val_rmse;
            row["val_mae"] = run.val_mae;
        }
        row["runtime_seconds"] = run.runtime_seconds;
        if (run.layers > 0) row["layers"] = run.layers;
        if (run.lag > 0) row["lag"] = run.lag;
        runs.push_back(std::move(row));
    }

    json grid;
    grid["size"] = result.runs.size();
    grid["runs"] = std::move(runs);
    grid["aggregates"] = {{"mean_val_rmse_by_layers", int_key_map(result.mean_val_rmse_by_layers)},
                          {"mean_val_rmse_by_lag", int_key_map(result.mean_val_rmse_by_lag)},
                          {"failures_by_layers", int_key_map(result.failures_by_layers)},
                          {"failures_by_lag", int_key_map(result.failures_by_lag)}};
    if (result.best_index) {
        grid["best"] = {{"index", *result.best_index},
                        {"config", result.runs[*result.best_index].config},
                        {"val", to_json(result.best_val)},
                        {"test", to_json(result.best_test)},
                        {"runtime_seconds", result.runs[*result.best_index].runtime_seconds}};
    }
    if (!result.notes.empty()) {
        grid["notes"] = result.notes;
    }
    if (!result.reference_best.is_null()) {
        grid["reference_best"] = result.reference_best;
    }
    doc["grid"] = std::move(grid);
    return doc;
}

void write_json(const json& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    out << doc.dump(2) << "\n";
    if (!out) {
        throw IoError("failed while writing " + path);
    }
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw IoError("invalid JSON in " + path + ": " + e.what());
    }
    return doc;
}

}  // namespace swardcast
