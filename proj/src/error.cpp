#include "mvf/error.hpp"

namespace mvf {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::InsufficientSmoothness: return "insufficient smoothness";
    case ErrorKind::FieldEvaluation: return "field evaluation";
    case ErrorKind::Support: return "support";
    case ErrorKind::Geometry: return "geometry";
    case ErrorKind::Quadrature: return "quadrature";
    case ErrorKind::SingularKernel: return "singular kernel";
    case ErrorKind::Mismatch: return "mismatch";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

}  // namespace mvf
