#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nest {

enum class ErrorCode
{
  NonPositiveSigma,
  NonFiniteValue,
  LengthMismatch,
  BadFoldCount,
  DegenerateWeights,
  AllCellsDegenerate,
  BadGroupCount,
  DomainError,
  ZeroMass,
  EmptyMonteCarlo,
  NoFeasibleRoot,
  ZeroTailMass,
  ParseError,
  NonsensicalCounts,
  InvalidArgument,
  IoError
};

std::string_view to_string(ErrorCode code);

//! Library exception. Carries a machine-readable code and, where the failure
//! is tied to one observation, its zero-based index.
class Error : public std::runtime_error
{
public:
  Error(ErrorCode code,
        const std::string& message,
        std::optional<std::size_t> index = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

} // namespace nest
