#include "lids/error.hpp"

namespace lids {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kNonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::kTokenCountMismatch: return "TokenCountMismatch";
    case ErrorCode::kInvalidText: return "InvalidText";
    case ErrorCode::kAllRowsZero: return "AllRowsZero";
    case ErrorCode::kZeroMatrix: return "ZeroMatrix";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kLayerOutOfRange: return "LayerOutOfRange";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyCurve: return "EmptyCurve";
    case ErrorCode::kEmptyReference: return "EmptyReference";
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kEmptyText: return "EmptyText";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kRankTooLarge: return "RankTooLarge";
    case ErrorCode::kZeroSingularValue: return "ZeroSingularValue";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kZeroDispersion: return "ZeroDispersion";
    case ErrorCode::kDegenerateRange: return "DegenerateRange";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kZeroDistanceVariance: return "ZeroDistanceVariance";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code), detail_(detail) {}

}  // namespace lids
