#pragma once

#include <stdexcept>
#include <string>

namespace mobinfer {

// Failure classes map one-to-one onto the CLI exit codes; keep the hierarchy
// flat so callers can catch by class. Precondition violations on individual
// operations (a query time outside the trace, i == j, ...) throw
// std::domain_error instead and count as runtime failures at the CLI level.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameter values, malformed config files, inconsistent options.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input files. Carries a 1-based line number when known.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, long line = 0)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}

  long line() const noexcept { return line_; }

 private:
  long line_ = 0;
};

// Structurally well-formed input that violates a domain invariant
// (overlapping contact intervals, node ids out of range, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace mobinfer
