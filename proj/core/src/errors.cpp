#include "conedet/errors.hpp"

namespace conedet {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid_input";
    case ErrorCode::kLambdaInQ0Block: return "lambda_in_q0_block";
    case ErrorCode::kLambdaLimitPoint: return "lambda_limit_point";
    case ErrorCode::kInvalidExtension: return "invalid_extension";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kKernel: return "nontrivial_kernel";
    case ErrorCode::kDegenerateDeterminant: return "degenerate_determinant";
    case ErrorCode::kContourHit: return "contour_hit";
    case ErrorCode::kNumericFailure: return "numeric_failure";
  }
  return "unknown";
}

}  // namespace conedet
