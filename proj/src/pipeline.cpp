#include "swardcast/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swardcast/errors.hpp"

namespace swardcast {

void SplitSpec::validate() const {
    if (train_fraction <= 0.0 || train_fraction >= 1.0 || val_fraction <= 0.0 ||
        val_fraction >= 1.0 || test_fraction <= 0.0 || test_fraction >= 1.0) {
        throw ConfigError("split fractions must lie in (0, 1)");
    }
    if (std::abs(train_fraction + val_fraction + test_fraction - 1.0) > 1e-9) {
        throw ConfigError("split fractions must sum to 1");
    }
}

DatasetSplits split(const TimeSeries& series, const SplitSpec& spec) {
    spec.validate();
    series.validate();
    const std::size_t n = series.size();
    const auto train_len = static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(n)));
    const auto val_len = static_cast<std::size_t>(std::floor(spec.val_fraction * static_cast<double>(n)));
    if (train_len == 0 || val_len == 0 || train_len + val_len >= n) {
        throw SeriesTooShort("series of length " + std::to_string(n) +
                             " leaves an empty split under the requested fractions");
    }
    const std::size_t test_len = n - train_len - val_len;

    auto slice = [&](std::size_t begin, std::size_t len) {
        TimeSeries part;
        part.values.assign(series.values.begin() + static_cast<std::ptrdiff_t>(begin),
                           series.values.begin() + static_cast<std::ptrdiff_t>(begin + len));
        part.start_index = series.start_index + static_cast<std::int64_t>(begin);
        if (series.timestamps) {
            part.timestamps.emplace(series.timestamps->begin() + static_cast<std::ptrdiff_t>(begin),
                                    series.timestamps->begin() + static_cast<std::ptrdiff_t>(begin + len));
        }
        return part;
    };

    DatasetSplits out;
    out.train = slice(0, train_len);
    out.val = slice(train_len, val_len);
    out.test = slice(train_len + val_len, test_len);
    return out;
}

MinMaxParams fit_minmax(const TimeSeries& train) {
    train.validate();
    MinMaxParams p{train.values.front(), train.values.front()};
    for (double v : train.values) {
        p.min = std::min(p.min, v);
        p.max = std::max(p.max, v);
    }
    if (p.max <= p.min) {
        throw DegenerateRange("training values are constant; min-max scaling undefined");
    }
    return p;
}

TimeSeries transform(const TimeSeries& series, const MinMaxParams& params) {
    if (params.max <= params.min) {
        throw DegenerateRange("invalid min-max parameters");
    }
    TimeSeries out = series;
    for (double& v : out.values) {
        v = transform_value(v, params);
    }
    return out;
}

TimeSeries inverse_transform(const TimeSeries& series, const MinMaxParams& params) {
    if (params.max <= params.min) {
        throw DegenerateRange("invalid min-max parameters");
    }
    TimeSeries out = series;
    for (double& v : out.values) {
        v = inverse_transform_value(v, params);
    }
    return out;
}

WindowedDataset window(const TimeSeries& series, int lag) {
    if (lag < 1) {
        throw ConfigError("lag must be at least 1");
    }
    const std::size_t n = series.size();
    if (n <= static_cast<std::size_t>(lag)) {
        throw SeriesTooShort("series of length " + std::to_string(n) +
                             " cannot be windowed with lag " + std::to_string(lag));
    }
    WindowedDataset ds;
    ds.lag = lag;
    const std::size_t samples = n - static_cast<std::size_t>(lag);
    ds.inputs.reserve(samples);
    ds.targets.reserve(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        ds.inputs.emplace_back(series.values.begin() + static_cast<std::ptrdiff_t>(i),
                               series.values.begin() + static_cast<std::ptrdiff_t>(i + lag));
        ds.targets.push_back(series.values[i + static_cast<std::size_t>(lag)]);
    }
    return ds;
}

}  // namespace swardcast
