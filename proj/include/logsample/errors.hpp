#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace logsample {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid arguments supplied by the caller (bad plan, k < 2, ...).
/// The CLI maps these to a usage error.
class UsageError : public Error {
public:
    using Error::Error;
};

/// Problems with the input data. The CLI maps these to a data error.
class DataError : public Error {
public:
    using Error::Error;
};

class MissingMandatoryField : public DataError {
public:
    using DataError::DataError;
};

class EmptyLog : public DataError {
public:
    using DataError::DataError;
};

class InvariantViolation : public DataError {
public:
    using DataError::DataError;
};

class ParseError : public DataError {
public:
    /// `line` is 1-based; 0 when the position is given in `reason` instead
    /// (XES element paths).
    ParseError(std::size_t line, const std::string& reason)
        : DataError(line ? "line " + std::to_string(line) + ": " + reason : reason), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class MappingError : public DataError {
public:
    using DataError::DataError;
};

class IoError : public DataError {
public:
    using DataError::DataError;
};

class UnknownAttribute : public DataError {
public:
    explicit UnknownAttribute(const std::string& name)
        : DataError("unknown attribute '" + name + "'") {}
};

class WrongAttributeKind : public DataError {
public:
    using DataError::DataError;
};

class EmptySample : public DataError {
public:
    using DataError::DataError;
};

class TooFewCases : public DataError {
public:
    using DataError::DataError;
};

class MissingOutcomeLabel : public DataError {
public:
    using DataError::DataError;
};

class EmptyInput : public DataError {
public:
    using DataError::DataError;
};

class ZeroDenominator : public DataError {
public:
    explicit ZeroDenominator(const std::string& field)
        : DataError("zero denominator in '" + field + "'"), field_(field) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class TaskMismatch : public DataError {
public:
    using DataError::DataError;
};

class SchemaMismatch : public DataError {
public:
    using DataError::DataError;
};

}  // namespace logsample
