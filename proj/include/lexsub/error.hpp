#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lexsub {

enum class ErrorCode {
  kAllZero,
  kNegativeWeight,
  kBackendUnavailable,
  kTargetOutOfRange,
  kVocabMismatch,
  kTargetEmbeddingMissing,
  kMalformedPattern,
  kDimensionMismatch,
  kEmptyAfterFiltering,
  kParseError,
  kEmptyGold,
  kMissingPoolEntry,
  kTooFewInstances,
  kNoSlotTokens,
  kEmptyDistribution,
  kUnknownPos,
  kInvalidArgument,
  kNotFound,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (CLI, HTTP layer, tests) can dispatch without parsing messages.
class LexsubError : public std::runtime_error {
 public:
  LexsubError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lexsub
