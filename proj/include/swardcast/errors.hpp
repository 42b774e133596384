#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace swardcast {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SeriesTooShort : public Error {
public:
    using Error::Error;
};

class DegenerateRange : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class InsufficientHistory : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

class HeadMismatch : public Error {
public:
    using Error::Error;
};

class DivergenceDetected : public Error {
public:
    using Error::Error;
};

class AllRunsFailed : public Error {
public:
    using Error::Error;
};

class NonMonotonicTimestamps : public Error {
public:
    using Error::Error;
};

/// Invalid user-supplied configuration (CLI flags, config JSON, grid files).
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// CSV parse failure; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::size_t row, const std::string& message)
        : Error("row " + std::to_string(row) + ": " + message), row_(row) {}

    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

}  // namespace swardcast
