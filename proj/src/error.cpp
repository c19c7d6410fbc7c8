#include "gibbs/error.hpp"

namespace gibbs {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::PointOutsideWindow: return "PointOutsideWindow";
    case ErrorCode::DuplicatePoint: return "DuplicatePoint";
    case ErrorCode::RadiusTooLarge: return "RadiusTooLarge";
    case ErrorCode::SideTooLarge: return "SideTooLarge";
    case ErrorCode::MissingBoundaryCondition: return "MissingBoundaryCondition";
    case ErrorCode::UnsupportedBoundaryModel: return "UnsupportedBoundaryModel";
    case ErrorCode::WrongPointCount: return "WrongPointCount";
    case ErrorCode::InfeasibleStart: return "InfeasibleStart";
    case ErrorCode::NonFiniteEnergy: return "NonFiniteEnergy";
    case ErrorCode::IntensityAssumption: return "IntensityAssumption";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::DensityExceedsCubes: return "DensityExceedsCubes";
    case ErrorCode::EventNotSatisfied: return "EventNotSatisfied";
    case ErrorCode::OutOfRegime: return "OutOfRegime";
    case ErrorCode::AllZeroWeights: return "AllZeroWeights";
    case ErrorCode::ZeroHits: return "ZeroHits";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::ConstraintViolated: return "ConstraintViolated";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace gibbs
