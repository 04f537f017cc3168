#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gchs {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. Columns are 1-based.
class ParseError : public Error {
 public:
  enum class Kind { syntax, index_out_of_range, unknown_identifier };

  ParseError(Kind kind, std::size_t column, const std::string& message)
      : Error("column " + std::to_string(column) + ": " + message), kind_(kind), column_(column) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t column() const noexcept { return column_; }

 private:
  Kind kind_;
  std::size_t column_;
};

/// Evaluation left the domain of a builtin (division by zero, log of zero, overflow).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a modelling rule (realness of H and s, arity).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Two algebraically equal routes disagreed beyond tolerance. Signals a derivative bug.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// The integrator could not continue; time() is where it stopped.
class IntegrationError : public Error {
 public:
  IntegrationError(double t, const std::string& message)
      : Error(message + " at t=" + std::to_string(t)), time_(t) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace gchs
