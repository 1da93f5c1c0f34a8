#pragma once

#include <stdexcept>
#include <string>

namespace m2m {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on a numeric argument was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Bayes normalizer vanished: the observation has zero probability under the prior.
class ZeroLikelihood : public Error {
 public:
  using Error::Error;
};

class StateSpaceTooLarge : public Error {
 public:
  using Error::Error;
};

// Brute-force enumeration refused because it would exceed its work guard.
class TooLarge : public Error {
 public:
  using Error::Error;
};

class AllRatesZero : public Error {
 public:
  using Error::Error;
};

// A configuration value failed validation. `field()` names the offending key.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Malformed configuration text. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace m2m
