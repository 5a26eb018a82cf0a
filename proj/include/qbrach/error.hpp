#pragma once

#include <stdexcept>
#include <string>

namespace qbrach {

enum class ErrorCode {
  invalid_dimension,
  dimension_mismatch,
  invalid_argument,
  invalid_subspace,
  branch_ambiguity,
  missing_costate,
  missing_derivative,
  implicit_function_violation,
  non_invertible_jacobian,
  infeasible_replacement,
  degenerate_problem,
  parse_error,
  io_error,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception type thrown by every operation in the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qbrach
