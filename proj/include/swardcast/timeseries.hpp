#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace swardcast {

/**
 * Ordered univariate observations (heights in cm) with integer week indices.
 *
 * Values must be non-empty and finite. Timestamps, when present, are ISO
 * dates, one per value, strictly increasing.
 */
struct TimeSeries {
    std::vector<double> values;
    std::int64_t start_index = 1;
    std::optional<std::vector<std::string>> timestamps;

    std::size_t size() const { return values.size(); }

    /// Throws EmptyInput / ConfigError / NonMonotonicTimestamps on violation.
    void validate() const;
};

/**
 * Parameters for the seeded synthetic generator: seasonal sine plus linear
 * trend plus Gaussian noise, a stand-in for weekly grass-height data.
 */
struct SyntheticSpec {
    std::size_t length = 1757;
    double period = 52.0;
    double amplitude = 40.0;
    double trend = 0.01;
    double noise = 5.0;
    double offset = 60.0;
    std::uint64_t seed = 42;
};

/// Deterministic for a fixed spec (identical values for identical seeds).
TimeSeries generate_synthetic(const SyntheticSpec& spec);

/**
 * Reads a `week,height` CSV (header optional, LF or CRLF). Week ordinals must
 * be strictly increasing; heights must be finite.
 *
 * Throws ParseError with the offending 1-based line number, or
 * NonMonotonicTimestamps.
 */
TimeSeries load_csv(const std::string& path);

/// Writes the series in the same `week,height` format load_csv accepts.
void save_csv(const TimeSeries& series, const std::string& path);

}  // namespace swardcast
