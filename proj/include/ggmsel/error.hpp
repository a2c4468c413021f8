#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ggmsel {

enum class ErrorKind {
  invalid_data,
  invalid_parameter,
  invalid_input,
  singular_input,
  domain,
  not_applicable,
  invalid_fold,
  degenerate_covariance,
  generation,
  unmatched_node,
  parse,
  io,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_data: return "invalid-data";
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::singular_input: return "singular-input";
    case ErrorKind::domain: return "domain";
    case ErrorKind::not_applicable: return "not-applicable";
    case ErrorKind::invalid_fold: return "invalid-fold";
    case ErrorKind::degenerate_covariance: return "degenerate-covariance";
    case ErrorKind::generation: return "generation";
    case ErrorKind::unmatched_node: return "unmatched-node";
    case ErrorKind::parse: return "parse";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

/// Library-wide exception. `kind()` classifies the failure so callers (and
/// the CLI's exit-status mapping) can react without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace ggmsel
