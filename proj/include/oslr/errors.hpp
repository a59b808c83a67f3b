#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace oslr {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A record violates an invariant (non-positive time, bad event flag, ...).
class ValidationError : public Error {
public:
    ValidationError(const std::string& what, std::size_t row = 0)
        : Error(what), row_(row) {}
    /// 1-based data row, 0 when not tied to a row.
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Input file layout is wrong (missing header, missing column).
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Parameter outside the open parameter space, or an invalid argument value.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Maximum likelihood fitting failed. Carries the last iterate when one exists.
class FitError : public Error {
public:
    FitError(const std::string& what, std::vector<double> last_iterate = {})
        : Error(what), last_iterate_(std::move(last_iterate)) {}
    const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

private:
    std::vector<double> last_iterate_;
};

/// Test statistic has zero variance (no events and nothing expected).
class DegenerateTestError : public Error {
public:
    using Error::Error;
};

/// Caller combined arguments in an unsupported way.
class UsageError : public Error {
public:
    using Error::Error;
};

/// No usable candidate in a model-selection call.
class SelectionError : public Error {
public:
    using Error::Error;
};

}  // namespace oslr
