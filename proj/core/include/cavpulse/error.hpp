#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cavpulse {

enum class ErrorCode {
  InvalidParameter,
  InconsistentMirrors,
  ThresholdExceeded,
  PoleProximity,
  SingularKernel,
  NoPulses,
  QuadratureNonConvergence,
  Io,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cavpulse
