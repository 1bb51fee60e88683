#pragma once

#include <stdexcept>
#include <string>

namespace shape {

enum class ErrorCode {
  kBehindCamera,
  kInvalidFov,
  kInvalidCamera,
  kSentinelObservation,
  kNoConstraints,
  kEmptyRegion,
  kDegenerateRegion,
  kAllSlicesEmpty,
  kNonPositiveInput,
  kInvalidConfig,
  kSegmentOutOfFov,
  kInvalidGrid,
  kParse,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBehindCamera: return "behind-camera";
    case ErrorCode::kInvalidFov: return "invalid-fov";
    case ErrorCode::kInvalidCamera: return "invalid-camera";
    case ErrorCode::kSentinelObservation: return "sentinel-observation";
    case ErrorCode::kNoConstraints: return "no-constraints";
    case ErrorCode::kEmptyRegion: return "empty-region";
    case ErrorCode::kDegenerateRegion: return "degenerate-region";
    case ErrorCode::kAllSlicesEmpty: return "all-slices-empty";
    case ErrorCode::kNonPositiveInput: return "nonpositive-input";
    case ErrorCode::kInvalidConfig: return "invalid-config";
    case ErrorCode::kSegmentOutOfFov: return "segment-out-of-fov";
    case ErrorCode::kInvalidGrid: return "invalid-grid";
    case ErrorCode::kParse: return "parse";
  }
  return "unknown";
}

/// All library failures. `code()` identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace shape
