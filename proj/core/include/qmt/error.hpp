#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qmt {

enum class ErrorCode {
  DuplicateLabel,
  EmptyFrame,
  FrameTooLarge,
  FrameMismatch,
  UnknownLabel,
  EmptySubset,
  EmptyBlock,
  OverlappingBlocks,
  IncompleteCover,
  EmptyList,
  InvalidMass,
  NotABeliefFunction,
  TotalConflict,
  UnknownNode,
  SelfLoop,
  DuplicateEdge,
  OverlappingSets,
  NotATree,
  NotAnEdge,
  MarkovViolation,
  MissingInbound,
  NoRunYet,
  HypothesisNotSatisfied,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code. `location()` names the node or
/// edge where a propagation error was detected, empty otherwise.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message, std::string location = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& location() const noexcept { return location_; }

private:
  ErrorCode code_;
  std::string location_;
};

}  // namespace qmt
