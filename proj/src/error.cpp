//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#include "opforge/error.hpp"

namespace opforge {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::kUnknownCharacter: return "UnknownCharacter";
  case ErrorCode::kUnterminatedBracket: return "UnterminatedBracket";
  case ErrorCode::kInvalidBracketAtom: return "InvalidBracketAtom";
  case ErrorCode::kSpecialTokenPresent: return "SpecialTokenPresent";
  case ErrorCode::kUnknownToken: return "UnknownToken";
  case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
  case ErrorCode::kEmptyInput: return "EmptyInput";
  case ErrorCode::kUnmatchedRingBond: return "UnmatchedRingBond";
  case ErrorCode::kInvalidRingClosure: return "InvalidRingClosure";
  case ErrorCode::kUnmatchedParenthesis: return "UnmatchedParenthesis";
  case ErrorCode::kDanglingBond: return "DanglingBond";
  case ErrorCode::kSingleFragmentOnly: return "SingleFragmentOnly";
  case ErrorCode::kPatternTooLarge: return "PatternTooLarge";
  case ErrorCode::kInvalidConfig: return "InvalidConfig";
  case ErrorCode::kIdOutOfRange: return "IdOutOfRange";
  case ErrorCode::kShapeMismatch: return "ShapeMismatch";
  case ErrorCode::kDegenerateDistribution: return "DegenerateDistribution";
  case ErrorCode::kVersionMismatch: return "VersionMismatch";
  case ErrorCode::kChecksumMismatch: return "ChecksumMismatch";
  case ErrorCode::kUnknownElementWeight: return "UnknownElementWeight";
  case ErrorCode::kUntypedAtom: return "UntypedAtom";
  case ErrorCode::kMalformedDataFile: return "MalformedDataFile";
  case ErrorCode::kUnknownFormat: return "UnknownFormat";
  case ErrorCode::kSeedMissingRequiredElements:
    return "SeedMissingRequiredElements";
  case ErrorCode::kSeedUntokenizable: return "SeedUntokenizable";
  case ErrorCode::kInvalidArgument: return "InvalidArgument";
  case ErrorCode::kMalformedTable: return "MalformedTable";
  case ErrorCode::kNoResultRows: return "NoResultRows";
  case ErrorCode::kMissingMappedColumn: return "MissingMappedColumn";
  case ErrorCode::kNoPlottableData: return "NoPlottableData";
  case ErrorCode::kIoFailure: return "IoFailure";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string &message,
             std::optional<std::size_t> position)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code), position_(position) { }

}  // namespace opforge
