#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace regcheck {

enum class ErrorCode {
  InvalidInput,
  MissingMetadata,
  MalformedAnnotation,
  NoRootVerb,
  IndexError,
  ZeroVector,
  DimensionMismatch,
  DuplicateId,
  ScorerContractViolation,
  ScoreUnavailable,
  AnswerUnavailable,
  UntrainableConcept,
  UnknownConcept,
  UnclassifiableConcept,
  InvalidRequirement,
  ParseError,
  CrossReferenceError,
  IoError,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; callers switch on code().
// line/column are 1-based and only set by the file loaders.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  Error(ErrorCode code, const std::string& message, int line,
        std::optional<int> column = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<int> line() const noexcept { return line_; }
  std::optional<int> column() const noexcept { return column_; }

 private:
  ErrorCode code_;
  std::optional<int> line_;
  std::optional<int> column_;
};

}  // namespace regcheck
