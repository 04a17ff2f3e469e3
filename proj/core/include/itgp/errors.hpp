#pragma once

#include <stdexcept>
#include <string>

namespace itgp {

/// Thrown when a computation fails numerically (e.g. a covariance matrix
/// that stays indefinite after jitter escalation, or an optimizer that
/// cannot produce a finite objective from any restart).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown when a model document cannot be parsed or fails schema validation.
class ModelError : public std::runtime_error {
public:
    explicit ModelError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown by the CSV reader; carries the 1-based line number of the offending row.
class CsvError : public std::runtime_error {
public:
    CsvError(std::size_t line, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

} // namespace itgp
