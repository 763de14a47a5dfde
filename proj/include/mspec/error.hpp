#pragma once

#include <stdexcept>
#include <string>

namespace mspec {

enum class ErrorCode {
  InvalidArgument = 1,
  InvalidDomain,
  GridTooCoarse,
  NotConverged,
  NotStieltjes,
  RankDeficient,
  NegativeWeight,
  InsufficientSamples,
  Parse,
  Io,
  Unsupported,
  CheckFailed,
};

const char* error_code_name(ErrorCode code) noexcept;

// Every failure raised by the library carries a code so the C boundary can
// map it onto a status value without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mspec
