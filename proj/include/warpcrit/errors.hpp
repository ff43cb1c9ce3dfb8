#pragma once

#include <stdexcept>
#include <string>

namespace warpcrit {

/// Failure categories raised by the numerical core.
enum class ErrorKind {
  InvalidArgument,
  NonPositiveR,
  StepFailure,
  DegenerateInitial,
  RangeError,
  DivergentIntegral,
  SingularEndpoint,
  OutOfRange,
  NoFreeInvolution,
  InvalidRegime,
  OutOfGrid,
  FiberMismatch,
  AllPointsMasked,
  CriticalLevel,
  GridTooCoarse,
};

[[nodiscard]] inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
      return "invalid_argument";
    case ErrorKind::NonPositiveR:
      return "non_positive_r";
    case ErrorKind::StepFailure:
      return "step_failure";
    case ErrorKind::DegenerateInitial:
      return "degenerate_initial";
    case ErrorKind::RangeError:
      return "range_error";
    case ErrorKind::DivergentIntegral:
      return "divergent_integral";
    case ErrorKind::SingularEndpoint:
      return "singular_endpoint";
    case ErrorKind::OutOfRange:
      return "out_of_range";
    case ErrorKind::NoFreeInvolution:
      return "no_free_involution";
    case ErrorKind::InvalidRegime:
      return "invalid_regime";
    case ErrorKind::OutOfGrid:
      return "out_of_grid";
    case ErrorKind::FiberMismatch:
      return "fiber_mismatch";
    case ErrorKind::AllPointsMasked:
      return "all_points_masked";
    case ErrorKind::CriticalLevel:
      return "critical_level";
    case ErrorKind::GridTooCoarse:
      return "grid_too_coarse";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace warpcrit
