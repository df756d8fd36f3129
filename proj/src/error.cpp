#include "nest/error.hpp"

namespace nest {

std::string_view
to_string(ErrorCode code)
{
  switch (code) {
    case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::BadFoldCount: return "BadFoldCount";
    case ErrorCode::DegenerateWeights: return "DegenerateWeights";
    case ErrorCode::AllCellsDegenerate: return "AllCellsDegenerate";
    case ErrorCode::BadGroupCount: return "BadGroupCount";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ZeroMass: return "ZeroMass";
    case ErrorCode::EmptyMonteCarlo: return "EmptyMonteCarlo";
    case ErrorCode::NoFeasibleRoot: return "NoFeasibleRoot";
    case ErrorCode::ZeroTailMass: return "ZeroTailMass";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonsensicalCounts: return "NonsensicalCounts";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code,
             const std::string& message,
             std::optional<std::size_t> index)
  : std::runtime_error(message)
  , code_(code)
  , index_(index)
{}

} // namespace nest
