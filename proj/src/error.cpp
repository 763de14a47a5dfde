#include "mspec/error.hpp"

namespace mspec {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::InvalidDomain: return "invalid domain";
    case ErrorCode::GridTooCoarse: return "grid too coarse";
    case ErrorCode::NotConverged: return "not converged";
    case ErrorCode::NotStieltjes: return "not a Stieltjes moment sequence";
    case ErrorCode::RankDeficient: return "rank-deficient Hankel matrix";
    case ErrorCode::NegativeWeight: return "negative recovered weight";
    case ErrorCode::InsufficientSamples: return "insufficient samples";
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::CheckFailed: return "check failed";
  }
  return "unknown";
}

}  // namespace mspec
