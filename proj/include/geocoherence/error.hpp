#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geocoherence {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration values (synthetic generator, extraction, ensemble, threat).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A trace row that could not be accepted. Carries the 1-based line number and
// the offending field so callers can report precisely.
class ParseError : public Error {
 public:
  enum class Kind { kMalformed, kRange, kTimestamp };

  ParseError(Kind kind, std::size_t line, std::string field, const std::string& detail);

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  Kind kind_;
  std::size_t line_;
  std::string field_;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

// Arithmetic that would leave the representable range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

}  // namespace geocoherence
