#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hurl {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands whose shapes do not line up (states, actions, vector lengths).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A scalar argument outside its admissible range (lambda, eta, tol, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Construction-time invariant violation: non-stochastic rows, rewards
/// outside the declared range, bad discount.
class InvalidModelError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver ran out of iterations.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual, long iterations)
      : Error(what), last_residual_(last_residual), iterations_(iterations) {}

  double last_residual() const noexcept { return last_residual_; }
  long iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  long iterations_;
};

/// Malformed input file. Carries the line (1-based, 0 when unknown) and the
/// offending field (empty when the failure is syntactic).
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& field,
             const std::string& detail)
      : Error(format(source, line, field, detail)), source_(source), line_(line), field_(field) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  static std::string format(const std::string& source, std::size_t line,
                            const std::string& field, const std::string& detail) {
    std::string msg = source;
    if (line > 0) msg += ":" + std::to_string(line);
    if (!field.empty()) msg += ": field '" + field + "'";
    msg += ": " + detail;
    return msg;
  }

  std::string source_;
  std::size_t line_;
  std::string field_;
};

/// File declares a schema version this build does not read.
class VersionError : public Error {
 public:
  VersionError(const std::string& source, int found, int expected)
      : Error(source + ": unsupported schema version " + std::to_string(found) +
              " (expected " + std::to_string(expected) + ")"),
        found_(found),
        expected_(expected) {}

  int found() const noexcept { return found_; }
  int expected() const noexcept { return expected_; }

 private:
  int found_;
  int expected_;
};

}  // namespace hurl
