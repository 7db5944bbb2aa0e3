#pragma once

#include <stdexcept>
#include <string>

namespace fpaug {

enum class ErrorCode {
  InvalidArgument,
  IoFailure,
  UnsupportedFormat,
  NotGrayscale,
  RegionOutOfBounds,
  NoFingerprintArea,
  PatchLargerThanArea,
  CenterOutOfBounds,
  WindowTooLarge,
  ZeroVariance,
  ImageTooSmall,
  EmptyDatabase,
  MalformedFilename,
  UnknownPreset,
  VerifyCountTooLarge,
  InvalidPlan,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the core carries one of the codes above so the C
// API can translate it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fpaug
