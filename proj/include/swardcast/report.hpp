#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "swardcast/forecaster.hpp"
#include "swardcast/tuning.hpp"

namespace swardcast {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolkitVersion = "0.1.0";

/// Provenance of one CLI run; enough to reproduce it (timing fields aside).
struct RunManifest {
    std::string command;
    std::string data_descriptor;
    std::uint64_t seed = 0;
    std::string config_digest;
    std::string started_at;
    std::string finished_at;
};

std::string iso8601_utc_now();

nlohmann::json to_json(const RunManifest& manifest);
nlohmann::json to_json(const EvalReport& report);
nlohmann::json to_json(const nn::TrainingTrace& trace);

/// Single-run training report: manifest, splits, val/test metrics, runtime,
/// loss curves (neural families), residual summary (arima).
nlohmann::json train_report_json(const FitOutcome& outcome, const RunManifest& manifest);

/// Grid-search report: per-run rows, per-layer and per-lag aggregates, the
/// winning config with its test metrics, notes, and reference expectations.
nlohmann::json grid_report_json(const GridSearchResult& result, const RunManifest& manifest);

void write_json(const nlohmann::json& doc, const std::string& path);
nlohmann::json read_json(const std::string& path);

}  // namespace swardcast
