#include "swardcast/timeseries.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "swardcast/errors.hpp"
#include "swardcast/rng.hpp"

namespace swardcast {

void TimeSeries::validate() const {
    if (values.empty()) {
        throw EmptyInput("time series has no values");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw ConfigError("time series contains a non-finite value");
        }
    }
    if (timestamps) {
        if (timestamps->size() != values.size()) {
            throw LengthMismatch("timestamp count does not match value count");
        }
        for (std::size_t i = 1; i < timestamps->size(); ++i) {
            if ((*timestamps)[i] <= (*timestamps)[i - 1]) {
                throw NonMonotonicTimestamps("timestamps must be strictly increasing");
            }
        }
    }
}

TimeSeries generate_synthetic(const SyntheticSpec& spec) {
    if (spec.length == 0) {
        throw ConfigError("synthetic length must be positive");
    }
    if (spec.noise < 0.0) {
        throw ConfigError("synthetic noise scale must be non-negative");
    }
    if (spec.period <= 0.0) {
        throw ConfigError("synthetic period must be positive");
    }
    Rng rng(spec.seed);
    TimeSeries out;
    out.start_index = 1;
    out.values.reserve(spec.length);
    for (std::size_t t = 0; t < spec.length; ++t) {
        double v = spec.offset + spec.trend * static_cast<double>(t) +
                   spec.amplitude * std::sin(2.0 * M_PI * static_cast<double>(t) / spec.period) +
                   spec.noise * rng.gaussian();
        out.values.push_back(v);
    }
    return out;
}

namespace {

void strip_trailing_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}

bool is_header(const std::string& line) {
    std::string lowered;
    lowered.reserve(line.size());
    for (char ch : line) {
        if (ch != ' ' && ch != '\t') {
            lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        }
    }
    return lowered == "week,height";
}

}  // namespace

TimeSeries load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }

    TimeSeries out;
    std::string line;
    std::size_t line_no = 0;
    bool first_data_row = true;
    std::int64_t prev_week = 0;

    while (std::getline(in, line)) {
        ++line_no;
        strip_trailing_cr(line);
        if (line_no == 1 && line.size() >= 3 && line[0] == '\xEF' && line[1] == '\xBB' &&
            line[2] == '\xBF') {
            line.erase(0, 3);
        }
        if (line.empty()) {
            continue;
        }
        if (line_no == 1 && is_header(line)) {
            continue;
        }

        auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ParseError(line_no, "expected `week,height`");
        }
        std::string week_field = line.substr(0, comma);
        std::string height_field = line.substr(comma + 1);

        std::int64_t week = 0;
        try {
            std::size_t used = 0;
            week = std::stoll(week_field, &used);
            while (used < week_field.size() && week_field[used] == ' ') ++used;
            if (used != week_field.size()) {
                throw std::invalid_argument("trailing characters");
            }
        } catch (const std::exception&) {
            throw ParseError(line_no, "invalid week ordinal `" + week_field + "`");
        }

        double height = 0.0;
        try {
            std::size_t used = 0;
            height = std::stod(height_field, &used);
            while (used < height_field.size() && height_field[used] == ' ') ++used;
            if (used != height_field.size()) {
                throw std::invalid_argument("trailing characters");
            }
        } catch (const std::exception&) {
            throw ParseError(line_no, "invalid height `" + height_field + "`");
        }
        if (!std::isfinite(height)) {
            throw ParseError(line_no, "height must be finite");
        }

        if (first_data_row) {
            out.start_index = week;
            first_data_row = false;
        } else if (week <= prev_week) {
            throw NonMonotonicTimestamps("week ordinals must be strictly increasing (line " +
                                         std::to_string(line_no) + ")");
        }
        prev_week = week;
        out.values.push_back(height);
    }

    if (out.values.empty()) {
        throw EmptyInput("no data rows in " + path);
    }
    return out;
}

void save_csv(const TimeSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    out << "week,height\n";
    char buf[64];
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%lld,%.6f\n",
                      static_cast<long long>(series.start_index + static_cast<std::int64_t>(i)),
                      series.values[i]);
        out << buf;
    }
    if (!out) {
        throw IoError("failed while writing " + path);
    }
}

}  // namespace swardcast
