#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geoscore {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (mismatched dimensions, bad ranges).
class ContractViolation : public Error {
  public:
    using Error::Error;
};

/// A value failed validation (negative count, non-finite frequency, ...).
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// Input data is well-formed but inconsistent (row sums, unknown strata, over-demand).
class IntegrityError : public Error {
  public:
    using Error::Error;
};

/// Exhaustive enumeration would exceed its configuration cap; use Monte Carlo instead.
class EnumerationCapExceeded : public Error {
  public:
    using Error::Error;
};

/// Malformed tabular input. Carries source name, 1-based line and column.
class ParseError : public Error {
  public:
    ParseError(std::string source, std::size_t line, std::size_t column, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          source_(std::move(source)),
          line_(line),
          column_(column) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

  private:
    std::string source_;
    std::size_t line_;
    std::size_t column_;
};

}  // namespace geoscore
