#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "mvf/carnot.hpp"
#include "mvf/charts.hpp"
#include "mvf/elliptic.hpp"
#include "mvf/quadrature.hpp"

namespace mvf {

enum class GeometryKind { Sphere, Ellipsoid, StarShaped, Koranyi };
std::string_view to_string(GeometryKind kind);

// Gamma*(x, y) with its derivatives in x. The paired operator has constant
// coefficients (A, b, c), stored here so kernels and certificates need no
// operator object. On H^1 the matrix A is m x m and acts on horizontal gradients.
class GreenFunction {
 public:
  using ValueFn = std::function<double(const Vec& x, const Vec& y)>;
  using GradientFn = std::function<Vec(const Vec& x, const Vec& y)>;
  using HessianFn = std::function<Mat(const Vec& x, const Vec& y)>;
  // Distance from the pole along the unit direction omega to {Gamma* = level};
  // empty for star-shaped kinds, which are resolved by root finding.
  using RayRadiusFn = std::function<double(const Vec& omega, double level)>;
  // Korányi radius of {Gamma* = level}.
  using GaugeRadiusFn = std::function<double(double level)>;

  struct Parts {
    std::string name;
    std::string operator_name;
    int dim = 0;
    GeometryKind kind = GeometryKind::Sphere;
    std::optional<StratifiedGroup> group;
    Mat a;
    Vec b;
    double c = 0.0;
    double lambda = 0.5;
    double Lambda = 2.0;
    ValueFn value;
    GradientFn gradient;
    HessianFn hessian;
    RayRadiusFn ray_radius;
    GaugeRadiusFn gauge_radius;
  };

  explicit GreenFunction(Parts parts);

  const std::string& name() const { return p_.name; }
  const std::string& operator_name() const { return p_.operator_name; }
  int dim() const { return p_.dim; }
  // N in R^N, Q on a Carnot group: the exponent of the level-radius map.
  int homogeneous_dim() const;
  GeometryKind kind() const { return p_.kind; }
  bool is_carnot() const { return p_.group.has_value(); }
  const StratifiedGroup& group() const;
  bool logarithmic() const { return !is_carnot() && p_.dim == 2; }

  const Mat& A() const { return p_.a; }
  const Vec& b() const { return p_.b; }
  double c() const { return p_.c; }
  bool has_drift() const { return p_.b.size() > 0 && p_.b.norm() > 0.0; }
  double lambda() const { return p_.lambda; }
  double Lambda() const { return p_.Lambda; }

  // Throw SingularKernel within the pole-exclusion distance.
  double value(const Vec& x, const Vec& y) const;
  Vec gradient(const Vec& x, const Vec& y) const;
  Mat hessian(const Vec& x, const Vec& y) const;
  // Phi(x)^T grad on a Carnot group, the Euclidean gradient otherwise.
  Vec horizontal_gradient(const Vec& x, const Vec& y) const;

  // 1/r^{D-2}, or log(1/r) in the plane.
  double level(double r) const;
  bool has_ray_radius() const { return static_cast<bool>(p_.ray_radius); }
  double ray_radius(const Vec& omega, double level) const;
  double gauge_radius(double level) const;
  // Radius of the Newtonian level set, a starting bracket for root finding.
  double radius_guess(double level) const;
  // Guard against evaluation at the pole itself; quadrature nodes never sit there.
  static constexpr double kPoleExclusion = 1e-200;

  ScalarField field(const Vec& y) const;
  GreenFunction scaled(double factor) const;

  // Operators whose adjoint this function inverts.
  EllipticOperator euclidean_operator() const;
  SubellipticOperator carnot_operator() const;

  // Flux certificate computed at construction (1 for a normalized Gamma*).
  const Estimate& certificate() const { return certificate_; }
  // Folland constant on H^1 (0 for the Euclidean catalog).
  double folland_constant() const { return folland_c0_; }

 private:
  friend GreenFunction gamma_folland(const StratifiedGroup& group);
  Parts p_;
  Estimate certificate_;
  double folland_c0_ = 0.0;
};

GreenFunction gamma_laplace(int n);
GreenFunction gamma_log2d();
GreenFunction gamma_const_coeff(const Mat& a);
GreenFunction gamma_yukawa(double k);
GreenFunction gamma_drift(const Vec& b);
GreenFunction gamma_folland(const StratifiedGroup& group);

// Closed surfaces for flux certificates. `interior` carries a volume rule
// over the enclosed region (needed when c != 0) and is built on request.
struct FluxSurface {
  std::vector<SurfaceNode> nodes;
  VolumeRule interior;
  Vec center;
  std::function<bool(const Vec&)> encloses;
};
using SurfaceBuilder = std::function<FluxSurface(const QuadratureSpec& quad, bool with_interior)>;

SurfaceBuilder euclidean_sphere(const Vec& center, double radius);
SurfaceBuilder koranyi_sphere(const StratifiedGroup& group, const Vec& center, double R);

// -oint <A grad Gamma* - Gamma* b, n> dH - int_V c Gamma*; on H^1 the
// conormal field is Phi A Phi^T grad Gamma*. Error is the change against the
// companion (coarse) rule.
Estimate normalize_by_flux(const GreenFunction& g, const Vec& pole, const SurfaceBuilder& surface,
                           const QuadratureSpec& quad);

struct BoundsReport {
  double c_minus = 0.0;
  double c_plus = 0.0;
  double c0 = 0.0;
  double grad_c_minus = 0.0;  // gradient bounds (Euclidean only)
  double grad_c_plus = 0.0;
  double grad_c0 = 0.0;
  double alpha = 1.0;
  std::string exponents;
  std::size_t violations = 0;
  std::size_t samples = 0;
};

// Fits the bound constants on pairs from the unit box and audits them on an
// independent sample of the same size.
BoundsReport validate_bounds(const GreenFunction& g, std::size_t samples, std::uint64_t seed, double alpha = 1.0);

// |u(y) + int Gamma*(x, y) (L u)(x) dx| over a ball around y covering the
// support of u, with the error estimate of the volume rule.
Estimate reproduction_identity_check(const GreenFunction& g, const ScalarField& u, const Vec& y,
                                     const QuadratureSpec& quad);

// Catalog lookup: "laplace:3", "log2d", "constA:diag=4,1,1", "yukawa:k=1",
// "drift:b=1,0,0", "folland:h1".
GreenFunction make_green(const std::string& text);

}  // namespace mvf
