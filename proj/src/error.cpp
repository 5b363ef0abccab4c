#include "forge/error.hpp"

namespace forge {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IntegrityError: return "IntegrityError";
    case ErrorCode::CorruptSnapshot: return "CorruptSnapshot";
    case ErrorCode::TooManyFacts: return "TooManyFacts";
    case ErrorCode::DanglingAnchor: return "DanglingAnchor";
    case ErrorCode::ProponentWithFacts: return "ProponentWithFacts";
    case ErrorCode::EmptyMessage: return "EmptyMessage";
    case ErrorCode::DuplicateEmail: return "DuplicateEmail";
    case ErrorCode::PhaseClosed: return "PhaseClosed";
    case ErrorCode::NoPaperSelected: return "NoPaperSelected";
    case ErrorCode::InvalidSubmission: return "InvalidSubmission";
    case ErrorCode::NotOwner: return "NotOwner";
    case ErrorCode::OverlapWithOwnSession: return "OverlapWithOwnSession";
    case ErrorCode::NonDivisibleDuration: return "NonDivisibleDuration";
    case ErrorCode::SlotTaken: return "SlotTaken";
    case ErrorCode::OwnPaper: return "OwnPaper";
    case ErrorCode::QuotaExceeded: return "QuotaExceeded";
    case ErrorCode::DuplicatePaper: return "DuplicatePaper";
    case ErrorCode::TimeConflict: return "TimeConflict";
    case ErrorCode::NotYourSlot: return "NotYourSlot";
    case ErrorCode::SlotWindowClosed: return "SlotWindowClosed";
    case ErrorCode::AlreadyJoined: return "AlreadyJoined";
    case ErrorCode::SessionNotActive: return "SessionNotActive";
    case ErrorCode::PastDeadline: return "PastDeadline";
    case ErrorCode::SessionStillOpen: return "SessionStillOpen";
    case ErrorCode::Unauthorized: return "Unauthorized";
    case ErrorCode::Forbidden: return "Forbidden";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::MethodNotAllowed: return "MethodNotAllowed";
    case ErrorCode::PayloadTooLarge: return "PayloadTooLarge";
    case ErrorCode::BadRequest: return "BadRequest";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::TooFewMessages: return "TooFewMessages";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NoMultiDialoguePapers: return "NoMultiDialoguePapers";
    case ErrorCode::UnlabeledSentences: return "UnlabeledSentences";
    case ErrorCode::DegenerateExpected: return "DegenerateExpected";
    case ErrorCode::NoVariance: return "NoVariance";
    case ErrorCode::TooFewPairableValues: return "TooFewPairableValues";
    case ErrorCode::NoGroundedMessages: return "NoGroundedMessages";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyFitSet: return "EmptyFitSet";
    case ErrorCode::TooFewPapers: return "TooFewPapers";
    case ErrorCode::GeneratorFailure: return "GeneratorFailure";
  }
  return "Unknown";
}

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::IntegrityError:
    case ErrorCode::TooManyFacts:
    case ErrorCode::DanglingAnchor:
    case ErrorCode::ProponentWithFacts:
    case ErrorCode::EmptyMessage:
    case ErrorCode::NoPaperSelected:
    case ErrorCode::InvalidSubmission:
    case ErrorCode::NonDivisibleDuration:
    case ErrorCode::BadRequest:
    case ErrorCode::InvalidArgument:
      return 400;
    case ErrorCode::Unauthorized:
      return 401;
    case ErrorCode::NotOwner:
    case ErrorCode::OwnPaper:
    case ErrorCode::NotYourSlot:
    case ErrorCode::Forbidden:
      return 403;
    case ErrorCode::NotFound:
      return 404;
    case ErrorCode::MethodNotAllowed:
      return 405;
    case ErrorCode::DuplicateEmail:
    case ErrorCode::PhaseClosed:
    case ErrorCode::OverlapWithOwnSession:
    case ErrorCode::SlotTaken:
    case ErrorCode::QuotaExceeded:
    case ErrorCode::DuplicatePaper:
    case ErrorCode::TimeConflict:
    case ErrorCode::SlotWindowClosed:
    case ErrorCode::AlreadyJoined:
    case ErrorCode::SessionNotActive:
    case ErrorCode::PastDeadline:
    case ErrorCode::SessionStillOpen:
      return 409;
    case ErrorCode::PayloadTooLarge:
      return 413;
    case ErrorCode::EmptyCorpus:
    case ErrorCode::TooFewMessages:
    case ErrorCode::ZeroVector:
    case ErrorCode::NoMultiDialoguePapers:
    case ErrorCode::UnlabeledSentences:
    case ErrorCode::DegenerateExpected:
    case ErrorCode::NoVariance:
    case ErrorCode::TooFewPairableValues:
    case ErrorCode::NoGroundedMessages:
    case ErrorCode::EmptyFitSet:
    case ErrorCode::TooFewPapers:
      return 422;
    case ErrorCode::CorruptSnapshot:
      return 500;
    case ErrorCode::GeneratorFailure:
      return 502;
  }
  return 500;
}

}  // namespace forge
