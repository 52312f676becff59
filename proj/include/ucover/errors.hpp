#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ucover {

enum class ErrorCode {
  invalid_radius,
  invalid_exponent,
  degenerate_measure,
  domain,
  unsupported_family,
  degenerate_radius,
  insufficient_samples,
  invalid_configuration,
  parse,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_radius: return "invalid-radius";
    case ErrorCode::invalid_exponent: return "invalid-exponent";
    case ErrorCode::degenerate_measure: return "degenerate-measure";
    case ErrorCode::domain: return "domain";
    case ErrorCode::unsupported_family: return "unsupported-family";
    case ErrorCode::degenerate_radius: return "degenerate-radius";
    case ErrorCode::insufficient_samples: return "insufficient-samples";
    case ErrorCode::invalid_configuration: return "invalid-configuration";
    case ErrorCode::parse: return "parse";
  }
  return "unknown";
}

/// All library failures are reported through this type; `code()` is stable and
/// is what the CLI serializes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ucover
