#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace evsynth {

/// Broad failure classes. The CLI maps these onto exit codes and the
/// HTTP service onto status codes, so every thrown error carries one.
enum class ErrorCategory {
  input,          // malformed input documents, bad counts, unknown ids
  schema,         // a JSON document violates its schema
  configuration,  // a run cannot start: missing lists, bad parameters
  estimation,     // numerics cannot produce an estimate
  state,          // illegal lifecycle transition
  not_found,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  [[nodiscard]] ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& message) : Error(ErrorCategory::input, message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorCategory::configuration, message) {}
};

class EstimationError : public Error {
 public:
  explicit EstimationError(const std::string& message)
      : Error(ErrorCategory::estimation, message) {}
};

class StateError : public Error {
 public:
  explicit StateError(const std::string& message) : Error(ErrorCategory::state, message) {}
};

class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& message) : Error(ErrorCategory::not_found, message) {}
};

/// One schema violation, located by JSON pointer (RFC 6901).
struct SchemaViolation {
  std::string pointer;
  std::string message;
};

class SchemaError : public Error {
 public:
  explicit SchemaError(std::vector<SchemaViolation> violations);

  [[nodiscard]] const std::vector<SchemaViolation>& violations() const noexcept {
    return violations_;
  }

 private:
  std::vector<SchemaViolation> violations_;
};

/// Malformed JSON text; byte_offset is where the parser gave up.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t byte_offset)
      : Error(ErrorCategory::input, message), byte_offset_(byte_offset) {}

  [[nodiscard]] std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

}  // namespace evsynth
