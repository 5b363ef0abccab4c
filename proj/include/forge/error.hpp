#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace forge {

/// Closed set of failure codes shared by every module. The gateway maps each
/// code to exactly one HTTP status (see http_status()).
enum class ErrorCode {
  // corpus / store
  ParseError,
  IntegrityError,
  CorruptSnapshot,
  // message validation
  TooManyFacts,
  DanglingAnchor,
  ProponentWithFacts,
  EmptyMessage,
  // scheduler
  DuplicateEmail,
  PhaseClosed,
  NoPaperSelected,
  InvalidSubmission,
  NotOwner,
  OverlapWithOwnSession,
  NonDivisibleDuration,
  SlotTaken,
  OwnPaper,
  QuotaExceeded,
  DuplicatePaper,
  TimeConflict,
  // live sessions
  NotYourSlot,
  SlotWindowClosed,
  AlreadyJoined,
  SessionNotActive,
  PastDeadline,
  SessionStillOpen,
  // gateway
  Unauthorized,
  Forbidden,
  NotFound,
  MethodNotAllowed,
  PayloadTooLarge,
  BadRequest,
  // analysis
  EmptyCorpus,
  TooFewMessages,
  ZeroVector,
  NoMultiDialoguePapers,
  UnlabeledSentences,
  DegenerateExpected,
  NoVariance,
  TooFewPairableValues,
  NoGroundedMessages,
  InvalidArgument,
  // baseline
  EmptyFitSet,
  TooFewPapers,
  GeneratorFailure,
};

inline constexpr ErrorCode kAllErrorCodes[] = {
    ErrorCode::ParseError,          ErrorCode::IntegrityError,
    ErrorCode::CorruptSnapshot,     ErrorCode::TooManyFacts,
    ErrorCode::DanglingAnchor,      ErrorCode::ProponentWithFacts,
    ErrorCode::EmptyMessage,        ErrorCode::DuplicateEmail,
    ErrorCode::PhaseClosed,         ErrorCode::NoPaperSelected,
    ErrorCode::InvalidSubmission,   ErrorCode::NotOwner,
    ErrorCode::OverlapWithOwnSession, ErrorCode::NonDivisibleDuration,
    ErrorCode::SlotTaken,           ErrorCode::OwnPaper,
    ErrorCode::QuotaExceeded,       ErrorCode::DuplicatePaper,
    ErrorCode::TimeConflict,        ErrorCode::NotYourSlot,
    ErrorCode::SlotWindowClosed,    ErrorCode::AlreadyJoined,
    ErrorCode::SessionNotActive,    ErrorCode::PastDeadline,
    ErrorCode::SessionStillOpen,    ErrorCode::Unauthorized,
    ErrorCode::Forbidden,           ErrorCode::NotFound,
    ErrorCode::MethodNotAllowed,    ErrorCode::PayloadTooLarge,
    ErrorCode::BadRequest,          ErrorCode::EmptyCorpus,
    ErrorCode::TooFewMessages,      ErrorCode::ZeroVector,
    ErrorCode::NoMultiDialoguePapers, ErrorCode::UnlabeledSentences,
    ErrorCode::DegenerateExpected,  ErrorCode::NoVariance,
    ErrorCode::TooFewPairableValues, ErrorCode::NoGroundedMessages,
    ErrorCode::InvalidArgument,     ErrorCode::EmptyFitSet,
    ErrorCode::TooFewPapers,        ErrorCode::GeneratorFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

/// HTTP status used by the gateway's error envelope.
int http_status(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string path = {})
      : std::runtime_error(std::move(message)), code_(code), path_(std::move(path)) {}

  ErrorCode code() const noexcept { return code_; }
  /// Location of the offending field for integrity errors, e.g.
  /// "dialogues[0].messages[3].facts". Empty when not applicable.
  const std::string& path() const noexcept { return path_; }

 private:
  ErrorCode code_;
  std::string path_;
};

}  // namespace forge
