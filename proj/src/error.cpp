#include "qbrach/error.hpp"

namespace qbrach {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_dimension: return "invalid-dimension";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::invalid_subspace: return "invalid-subspace";
    case ErrorCode::branch_ambiguity: return "branch-ambiguity";
    case ErrorCode::missing_costate: return "missing-costate";
    case ErrorCode::missing_derivative: return "missing-derivative";
    case ErrorCode::implicit_function_violation: return "implicit-function-violation";
    case ErrorCode::non_invertible_jacobian: return "non-invertible-jacobian";
    case ErrorCode::infeasible_replacement: return "infeasible-replacement";
    case ErrorCode::degenerate_problem: return "degenerate-problem";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

}  // namespace qbrach
