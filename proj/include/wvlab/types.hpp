// Core scalar types, error codes and execution policy shared by every module.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wvlab {

// Extended precision is used internally: near |z| = 1 the verification discs
// shrink below the resolution of double.
using Real = long double;
using Complex = std::complex<Real>;

inline constexpr Real kPi = 3.141592653589793238462643383279502884L;
inline constexpr Real kTwoPi = 2 * kPi;

enum class ErrorCode {
  InvalidSpec,
  InvalidArgument,
  OutsideDisc,
  ZeroOrPoleOnPath,
  PoleOrZeroAt,
  TractViolation,
  NoOracle,
  DomainError,
  InsufficientData,
  NeverAttained,
  PreconditionFailed,
  WindowRejected,
  NotMonotone,
  ExceptionalRadius,
  NotZeroOrder,
  TruncationDominates,
  ConfigError,
  MissingArtifact,
  PipelineError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Positive-order window rejected; carries the (1-r_n)^{1+rho0} a^{1-2beta} value.
class WindowRejectedError : public Error {
 public:
  WindowRejectedError(Real diagnostic, const std::string& message)
      : Error(ErrorCode::WindowRejected, message), diagnostic_(diagnostic) {}
  Real diagnostic() const noexcept { return diagnostic_; }

 private:
  Real diagnostic_;
};

// Serial is the reference path; Parallel fans independent samples out over OpenMP.
// Both produce bit-identical results.
enum class Execution { Serial, Parallel };

}  // namespace wvlab
