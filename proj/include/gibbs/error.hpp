#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gibbs {

enum class ErrorCode {
  InvalidArgument,
  PointOutsideWindow,
  DuplicatePoint,
  RadiusTooLarge,
  SideTooLarge,
  MissingBoundaryCondition,
  UnsupportedBoundaryModel,
  WrongPointCount,
  InfeasibleStart,
  NonFiniteEnergy,
  IntensityAssumption,
  PreconditionViolated,
  WindowTooSmall,
  DensityExceedsCubes,
  EventNotSatisfied,
  OutOfRegime,
  AllZeroWeights,
  ZeroHits,
  UnknownKey,
  TypeMismatch,
  ConstraintViolated,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; the code drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gibbs
