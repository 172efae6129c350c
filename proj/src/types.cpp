#include "wvlab/types.hpp"

namespace wvlab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OutsideDisc: return "OutsideDisc";
    case ErrorCode::ZeroOrPoleOnPath: return "ZeroOrPoleOnPath";
    case ErrorCode::PoleOrZeroAt: return "PoleOrZeroAt";
    case ErrorCode::TractViolation: return "TractViolation";
    case ErrorCode::NoOracle: return "NoOracle";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NeverAttained: return "NeverAttained";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::WindowRejected: return "WindowRejected";
    case ErrorCode::NotMonotone: return "NotMonotone";
    case ErrorCode::ExceptionalRadius: return "ExceptionalRadius";
    case ErrorCode::NotZeroOrder: return "NotZeroOrder";
    case ErrorCode::TruncationDominates: return "TruncationDominates";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::MissingArtifact: return "MissingArtifact";
    case ErrorCode::PipelineError: return "PipelineError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace wvlab

#include "wvlab/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wvlab::detail {

void set_worker_count(int workers) {
#ifdef _OPENMP
  if (workers > 0) omp_set_num_threads(workers);
#else
  (void)workers;
#endif
}

int worker_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace wvlab::detail
