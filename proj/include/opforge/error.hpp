//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#ifndef OPFORGE_ERROR_HPP_
#define OPFORGE_ERROR_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace opforge {

enum class ErrorCode {
  // smiles
  kUnknownCharacter,
  kUnterminatedBracket,
  kInvalidBracketAtom,
  kSpecialTokenPresent,
  kUnknownToken,
  kEmptyCorpus,
  kEmptyInput,
  kUnmatchedRingBond,
  kInvalidRingClosure,
  kUnmatchedParenthesis,
  kDanglingBond,
  kSingleFragmentOnly,
  kPatternTooLarge,
  // neural
  kInvalidConfig,
  kIdOutOfRange,
  kShapeMismatch,
  kDegenerateDistribution,
  kVersionMismatch,
  kChecksumMismatch,
  // properties
  kUnknownElementWeight,
  kUntypedAtom,
  kMalformedDataFile,
  // pipeline
  kUnknownFormat,
  kSeedMissingRequiredElements,
  kSeedUntokenizable,
  kInvalidArgument,
  // adapters / report
  kMalformedTable,
  kNoResultRows,
  kMissingMappedColumn,
  kNoPlottableData,
  // shared
  kIoFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library; `code()` drives CLI exit codes and
// `position()` carries a character offset or atom index when one applies.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message,
        std::optional<std::size_t> position = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> position() const noexcept { return position_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> position_;
};

}  // namespace opforge

#endif  // OPFORGE_ERROR_HPP_
