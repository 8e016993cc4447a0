#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace planforge {

// Input text that could not be tokenized or does not match the expected
// grammar. Carries the 1-based source position when one is known.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& message, int line = 0, int column = 0)
      : std::runtime_error(format(message, line, column)),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(const std::string& message, int line, int column) {
    if (line <= 0) return message;
    std::string out = "line " + std::to_string(line);
    if (column > 0) out += ", column " + std::to_string(column);
    out += ": ";
    out += message;
    return out;
  }

  int line_;
  int column_;
};

// Well-formed input that violates a domain invariant (all-zero RSM column,
// selectivity out of range, invalid plan, ...).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& message)
      : std::runtime_error(message) {}
};

// A reference to an entity that does not exist in the current context
// (unknown relation, predicate over a relation absent from FROM, ...).
class SemanticError : public std::runtime_error {
 public:
  explicit SemanticError(const std::string& message)
      : std::runtime_error(message) {}
};

// Run configuration rejected before the first iteration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& message)
      : std::runtime_error(message) {}
};

// The plan space exceeds the enumeration bound; exhaustive work refused.
class SaturationError : public std::runtime_error {
 public:
  SaturationError(const std::string& message, double estimated_plans)
      : std::runtime_error(message), estimated_plans_(estimated_plans) {}

  double estimated_plans() const { return estimated_plans_; }

 private:
  double estimated_plans_;
};

}  // namespace planforge
