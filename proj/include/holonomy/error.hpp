#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace holonomy {

enum class ErrorCode {
  dimension,
  not_in_algebra,
  numerical,
  trivial_x,
  ill_conditioned,
  not_applicable,
  invalid_input,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::dimension: return "dimension";
    case ErrorCode::not_in_algebra: return "not_in_algebra";
    case ErrorCode::numerical: return "numerical";
    case ErrorCode::trivial_x: return "trivial_X";
    case ErrorCode::ill_conditioned: return "ill_conditioned";
    case ErrorCode::not_applicable: return "not_applicable";
    case ErrorCode::invalid_input: return "invalid_input";
  }
  return "unknown";
}

/// Every failure raised by the library. `what()` starts with the code name.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace holonomy
