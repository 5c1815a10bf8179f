#include "qmt/error.hpp"

namespace qmt {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::EmptyFrame: return "EmptyFrame";
    case ErrorCode::FrameTooLarge: return "FrameTooLarge";
    case ErrorCode::FrameMismatch: return "FrameMismatch";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::EmptySubset: return "EmptySubset";
    case ErrorCode::EmptyBlock: return "EmptyBlock";
    case ErrorCode::OverlappingBlocks: return "OverlappingBlocks";
    case ErrorCode::IncompleteCover: return "IncompleteCover";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::InvalidMass: return "InvalidMass";
    case ErrorCode::NotABeliefFunction: return "NotABeliefFunction";
    case ErrorCode::TotalConflict: return "TotalConflict";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::OverlappingSets: return "OverlappingSets";
    case ErrorCode::NotATree: return "NotATree";
    case ErrorCode::NotAnEdge: return "NotAnEdge";
    case ErrorCode::MarkovViolation: return "MarkovViolation";
    case ErrorCode::MissingInbound: return "MissingInbound";
    case ErrorCode::NoRunYet: return "NoRunYet";
    case ErrorCode::HypothesisNotSatisfied: return "HypothesisNotSatisfied";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {

std::string format_what(ErrorCode code, const std::string& message, const std::string& location) {
  std::string what{to_string(code)};
  if (!message.empty()) {
    what += ": ";
    what += message;
  }
  if (!location.empty()) {
    what += " (at ";
    what += location;
    what += ")";
  }
  return what;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::string location)
    : std::runtime_error(format_what(code, message, location)),
      code_(code),
      location_(std::move(location)) {}

}  // namespace qmt
