#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcvd {

enum class ErrorCode {
  DegenerateGeometry,
  SphereIntersectsPlane,
  PlanesNotParallel,
  SphereOutsideSlab,
  InvalidParameter,
  NonPositiveTime,
  ConfigInvalid,
  ReceiverUnknown,
  SpecInvalid,
  LengthMismatch,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception type thrown by every module of the library. The code lets
/// callers (the CLI in particular) map failures onto exit statuses without
/// parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mcvd
