#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mvf {

enum class ErrorKind {
  InvalidArgument,
  InsufficientSmoothness,
  FieldEvaluation,
  Support,
  Geometry,
  Quadrature,
  SingularKernel,
  Mismatch,
  Config,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this type; kind() lets callers
// (the CLI in particular) decide whether a failure is per-cell or fatal.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mvf
