#pragma once

#include <stdexcept>
#include <string>

namespace lids {

enum class ErrorCode {
  kBadMagic,
  kUnsupportedVersion,
  kTruncatedFile,
  kNonFiniteEntry,
  kTokenCountMismatch,
  kInvalidText,
  kAllRowsZero,
  kZeroMatrix,
  kNumericalFailure,
  kLayerOutOfRange,
  kDimensionMismatch,
  kEmptyCurve,
  kEmptyReference,
  kMissingFile,
  kEmptyText,
  kEmptyInput,
  kRankTooLarge,
  kZeroSingularValue,
  kLengthMismatch,
  kZeroDispersion,
  kDegenerateRange,
  kZeroVariance,
  kZeroDistanceVariance,
  kInvalidArgument,
  kParseError,
};

const char* to_string(ErrorCode code) noexcept;

// All library failures are reported through this type; `code()` is stable,
// the message carries offsets, indices or paths.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace lids
