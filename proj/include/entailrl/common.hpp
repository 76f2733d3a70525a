#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace entailrl {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Fixed-width feature vector consumed by the sentence-selection policy.
inline constexpr std::size_t kFeatureCount = 8;
using FeatureVector = std::array<double, kFeatureCount>;

enum class ErrorCode {
  // proof grammar / tree construction
  GrammarError,
  UndefinedPremise,
  DuplicateConclusion,
  ReusedPremise,
  DisconnectedStep,
  UnknownNode,
  // dataset ingestion
  MalformedRecord,
  EmptyAfterFilter,
  EmptyInstance,
  // environment / policy
  InvalidAction,
  DegenerateDistribution,
  NonFiniteGradient,
  UnknownSimilarityFunction,
  // remote deduction
  ConnectionError,
  MalformedResponse,
  // io
  IoError,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::GrammarError: return "GrammarError";
    case ErrorCode::UndefinedPremise: return "UndefinedPremise";
    case ErrorCode::DuplicateConclusion: return "DuplicateConclusion";
    case ErrorCode::ReusedPremise: return "ReusedPremise";
    case ErrorCode::DisconnectedStep: return "DisconnectedStep";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::EmptyAfterFilter: return "EmptyAfterFilter";
    case ErrorCode::EmptyInstance: return "EmptyInstance";
    case ErrorCode::InvalidAction: return "InvalidAction";
    case ErrorCode::DegenerateDistribution: return "DegenerateDistribution";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::UnknownSimilarityFunction: return "UnknownSimilarityFunction";
    case ErrorCode::ConnectionError: return "ConnectionError";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

  // Numerical failures map to a distinct CLI exit code (3) from input errors (2).
  bool numerical() const {
    return code_ == ErrorCode::NonFiniteGradient ||
           code_ == ErrorCode::DegenerateDistribution;
  }

 private:
  ErrorCode code_;
};

}  // namespace entailrl
