#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace conedet {

enum class ErrorCode {
  kInvalidInput,        // malformed arguments, dimension mismatch, unmet method preconditions
  kLambdaInQ0Block,     // lambda == -1/4 handed to the q1 machinery
  kLambdaLimitPoint,    // lambda >= 3/4: no extension freedom
  kInvalidExtension,    // (A, B) fails the Lagrangian criterion
  kParse,               // problem file could not be read or decoded
  kKernel,              // zero is an eigenvalue of the model operator
  kDegenerateDeterminant,  // p(x, y) vanishes identically
  kContourHit,          // contour passes through or encloses a zero of F
  kNumericFailure,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace conedet
