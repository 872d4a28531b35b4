#pragma once

#include <stdexcept>
#include <string>

namespace nldiff {

/// Invalid exponent, dimension, time or argument outside the model's range.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

/// An iterative method (bisection, shooting) did not converge, or NaN appeared.
class NumericalFailure : public std::runtime_error {
public:
    explicit NumericalFailure(const std::string& msg) : std::runtime_error(msg) {}
};

/// The explicit scheme produced a value that cannot be repaired by clamping.
class InstabilityError : public std::runtime_error {
public:
    InstabilityError(const std::string& msg, std::size_t cell)
        : std::runtime_error(msg + " (cell " + std::to_string(cell) + ")"), cell_(cell) {}

    std::size_t cell() const noexcept { return cell_; }

private:
    std::size_t cell_;
};

/// A target grid does not cover the support of the field being mapped onto it.
class CoverageError : public std::runtime_error {
public:
    explicit CoverageError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed configuration file; carries the offending line when known.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& msg, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

/// A file could not be opened or written; the message names the path.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace nldiff
