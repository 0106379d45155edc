#include "regcheck/error.hpp"

namespace regcheck {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::MissingMetadata: return "MissingMetadata";
    case ErrorCode::MalformedAnnotation: return "MalformedAnnotation";
    case ErrorCode::NoRootVerb: return "NoRootVerb";
    case ErrorCode::IndexError: return "IndexError";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::ScorerContractViolation: return "ScorerContractViolation";
    case ErrorCode::ScoreUnavailable: return "ScoreUnavailable";
    case ErrorCode::AnswerUnavailable: return "AnswerUnavailable";
    case ErrorCode::UntrainableConcept: return "UntrainableConcept";
    case ErrorCode::UnknownConcept: return "UnknownConcept";
    case ErrorCode::UnclassifiableConcept: return "UnclassifiableConcept";
    case ErrorCode::InvalidRequirement: return "InvalidRequirement";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::CrossReferenceError: return "CrossReferenceError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string located(const std::string& message, int line,
                    std::optional<int> column) {
  std::string out = "line " + std::to_string(line);
  if (column) out += ", column " + std::to_string(*column);
  return out + ": " + message;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

Error::Error(ErrorCode code, const std::string& message, int line,
             std::optional<int> column)
    : std::runtime_error(std::string(to_string(code)) + ": " +
                         located(message, line, column)),
      code_(code),
      line_(line),
      column_(column) {}

}  // namespace regcheck
