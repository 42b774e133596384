#pragma once

#include <cstddef>
#include <vector>

#include "swardcast/timeseries.hpp"

namespace swardcast {

/// Chronological train/validation/test fractions; must sum to 1.
struct SplitSpec {
    double train_fraction = 0.6;
    double val_fraction = 0.2;
    double test_fraction = 0.2;

    void validate() const;
};

/**
 * Contiguous chronological splits: concatenating train, val, test in order
 * reproduces the source series exactly.
 */
struct DatasetSplits {
    TimeSeries train;
    TimeSeries val;
    TimeSeries test;
};

/**
 * Splits a series chronologically. Train and val lengths are
 * floor(fraction * N); test absorbs the remainder.
 *
 * Throws SeriesTooShort when any split would be empty.
 */
DatasetSplits split(const TimeSeries& series, const SplitSpec& spec);

struct MinMaxParams {
    double min = 0.0;
    double max = 1.0;
};

/// Min/max of the training values only. Throws DegenerateRange when equal.
MinMaxParams fit_minmax(const TimeSeries& train);

inline double transform_value(double v, const MinMaxParams& p) {
    return (v - p.min) / (p.max - p.min);
}

inline double inverse_transform_value(double v, const MinMaxParams& p) {
    return v * (p.max - p.min) + p.min;
}

/// (v - min) / (max - min) per element. Values outside the fitted range map
/// outside [0, 1]; no clipping.
TimeSeries transform(const TimeSeries& series, const MinMaxParams& params);

TimeSeries inverse_transform(const TimeSeries& series, const MinMaxParams& params);

/**
 * Supervised one-step-ahead view of a series: row i holds
 * series[i .. i+lag) and targets[i] = series[i+lag].
 */
struct WindowedDataset {
    std::vector<std::vector<double>> inputs;
    std::vector<double> targets;
    int lag = 1;

    std::size_t size() const { return targets.size(); }
};

/// Throws SeriesTooShort when the series has no sample after windowing.
WindowedDataset window(const TimeSeries& series, int lag);

}  // namespace swardcast
