#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vortex {

enum class ErrorCode {
  EmptyWindow,
  NoConvergence,
  TrivialSolution,
  GridMismatch,
  EigensolverFailure,
  UndefinedSignature,
  NoTransition,
  MultipleTransitions,
  SignatureMismatch,
  Inconclusive,
  GridTooCoarse,
  NonConvergent,
  BoxWrap,
  Unstable,
  CouplingConstraint,
  ConfigError,
  IoError,
};

std::string_view error_name(ErrorCode code);

// All library failures carry a machine-readable code; the CLI maps them to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace vortex
