#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace opfree {

enum class ErrorKind {
  InvalidArgument,
  NonFinite,
  DimensionMismatch,
  RankDeficient,
  ConvergenceFailure,
  ZeroMatrix,
  InvalidRange,
  NoComplement,
  Underresolved,
  PecletViolation,
  SingularOperator,
  EmptyTail,
  InsufficientData,
  ZeroEigenvalue,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Library error. Every throwing operation in opfree raises this type; the
/// kind identifies the failed contract and module() names the component
/// ("linalg", "sketch", "pde", "adjoint-free", "cli") that raised it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string_view module, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

}  // namespace opfree
