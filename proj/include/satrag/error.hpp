#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace satrag {

enum class ErrorCode {
  MalformedInput,
  EmptyDocument,
  MultipleTables,
  HeaderDetectionAmbiguous,
  NotADataCell,
  NoAttribute,
  IoFailure,
  VersionMismatch,
  CorruptIndex,
  NoSlots,
  AnchorNotResolved,
  EmptyIntersection,
  EmptyEvidence,
  ProviderFailure,
  EmptyCompletion,
  InputTooLong,
  UnparseableSubject,
  EmptyGold,
  UnparseableEntity,
  InsufficientCandidates,
  UnparseableValidation,
  ConfigError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::MultipleTables: return "MultipleTables";
    case ErrorCode::HeaderDetectionAmbiguous: return "HeaderDetectionAmbiguous";
    case ErrorCode::NotADataCell: return "NotADataCell";
    case ErrorCode::NoAttribute: return "NoAttribute";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptIndex: return "CorruptIndex";
    case ErrorCode::NoSlots: return "NoSlots";
    case ErrorCode::AnchorNotResolved: return "AnchorNotResolved";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::EmptyEvidence: return "EmptyEvidence";
    case ErrorCode::ProviderFailure: return "ProviderFailure";
    case ErrorCode::EmptyCompletion: return "EmptyCompletion";
    case ErrorCode::InputTooLong: return "InputTooLong";
    case ErrorCode::UnparseableSubject: return "UnparseableSubject";
    case ErrorCode::EmptyGold: return "EmptyGold";
    case ErrorCode::UnparseableEntity: return "UnparseableEntity";
    case ErrorCode::InsufficientCandidates: return "InsufficientCandidates";
    case ErrorCode::UnparseableValidation: return "UnparseableValidation";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

// All library failures surface as Error; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace satrag
