#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace collage {

enum class ErrorCode {
  DegenerateGeometry,
  InvalidSplit,
  InvalidShape,
  InvalidManifest,
  PreconditionViolated,
  SliceFailure,
  IoError,
};

inline constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::InvalidSplit: return "InvalidSplit";
    case ErrorCode::InvalidShape: return "InvalidShape";
    case ErrorCode::InvalidManifest: return "InvalidManifest";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::SliceFailure: return "SliceFailure";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Non-fatal conditions reported alongside a result.
enum class WarningCode {
  ThinRegion,
  CornerUnresolvable,
  NonConvexResidual,
  NonConvexMerge,
  UnreadableImage,
  DiscardedComponent,
  HighUnbalancedProbability,
};

inline constexpr std::string_view to_string(WarningCode code) {
  switch (code) {
    case WarningCode::ThinRegion: return "ThinRegion";
    case WarningCode::CornerUnresolvable: return "CornerUnresolvable";
    case WarningCode::NonConvexResidual: return "NonConvexResidual";
    case WarningCode::NonConvexMerge: return "NonConvexMerge";
    case WarningCode::UnreadableImage: return "UnreadableImage";
    case WarningCode::DiscardedComponent: return "DiscardedComponent";
    case WarningCode::HighUnbalancedProbability: return "HighUnbalancedProbability";
  }
  return "Unknown";
}

struct Warning {
  WarningCode code;
  std::string message;
};

using Warnings = std::vector<Warning>;

inline bool has_warning(const Warnings& ws, WarningCode code) {
  for (const auto& w : ws)
    if (w.code == code) return true;
  return false;
}

}  // namespace collage
