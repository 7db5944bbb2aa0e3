#include "error.hpp"

namespace fpaug {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::NotGrayscale: return "NotGrayscale";
    case ErrorCode::RegionOutOfBounds: return "RegionOutOfBounds";
    case ErrorCode::NoFingerprintArea: return "NoFingerprintArea";
    case ErrorCode::PatchLargerThanArea: return "PatchLargerThanArea";
    case ErrorCode::CenterOutOfBounds: return "CenterOutOfBounds";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::EmptyDatabase: return "EmptyDatabase";
    case ErrorCode::MalformedFilename: return "MalformedFilename";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::VerifyCountTooLarge: return "VerifyCountTooLarge";
    case ErrorCode::InvalidPlan: return "InvalidPlan";
  }
  return "Unknown";
}

}  // namespace fpaug
