#include "vortex/errors.hpp"

namespace vortex {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::TrivialSolution: return "TrivialSolution";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::EigensolverFailure: return "EigensolverFailure";
    case ErrorCode::UndefinedSignature: return "UndefinedSignature";
    case ErrorCode::NoTransition: return "NoTransition";
    case ErrorCode::MultipleTransitions: return "MultipleTransitions";
    case ErrorCode::SignatureMismatch: return "SignatureMismatch";
    case ErrorCode::Inconclusive: return "Inconclusive";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::BoxWrap: return "BoxWrap";
    case ErrorCode::Unstable: return "Unstable";
    case ErrorCode::CouplingConstraint: return "CouplingConstraint";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

}  // namespace vortex
