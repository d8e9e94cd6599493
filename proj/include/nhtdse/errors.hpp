#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nhtdse {

enum class ErrorKind {
  Defective,
  NonFinite,
  TrackingLost,
  NotPositiveDefinite,
  DimensionMismatch,
  ZeroState,
  IllConditionedMetric,
  QuenchAdjacent,
  StepSizeUnderflow,
  DegenerateOverlap,
  DegenerateFermiLevel,
};

std::string_view error_name(ErrorKind kind) noexcept;

// Every numerical failure the library reports carries one of the kinds above
// so callers (the CLI in particular) can map it to a stable name.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nhtdse
