#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace revmc {

enum class ErrorCode {
  NonPositiveWeight,
  TooFewStates,
  NotNormalized,
  NegativeEntry,
  NotRowStochastic,
  DimensionMismatch,
  NotReversible,
  NotIrreducible,
  NotStationary,
  SingularSystem,
  PeriodicChain,
  BadStartState,
  BadArgument,
  NoNegativeEigenvalue,
  NotStrictlyPositive,
  NotSelfAdjoint,
  BadWeights,
  BadMixingProbability,
  BadComponentIndex,
  BadBlockIndex,
  NotReversibleForConditional,
  StructureMismatch,
  NotIrreducibleMixture,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every library failure is reported as an Error carrying a machine-readable
/// code; the message names the offending entry where one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace revmc
