#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace parasitech {

enum class ErrorCode {
  invalid_input,
  insufficient_data,
  singular_design,
  collinearity,
  undefined_correlation,
  degenerate_series,
  invalid_k,
  fit_failure,
  no_overlap,
  format,
  empty_series,
  io,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_input: return "invalid_input";
    case ErrorCode::insufficient_data: return "insufficient_data";
    case ErrorCode::singular_design: return "singular_design";
    case ErrorCode::collinearity: return "collinearity";
    case ErrorCode::undefined_correlation: return "undefined_correlation";
    case ErrorCode::degenerate_series: return "degenerate_series";
    case ErrorCode::invalid_k: return "invalid_k";
    case ErrorCode::fit_failure: return "fit_failure";
    case ErrorCode::no_overlap: return "no_overlap";
    case ErrorCode::format: return "format";
    case ErrorCode::empty_series: return "empty_series";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace parasitech
