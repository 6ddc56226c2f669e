#pragma once

#include <functional>
#include <vector>

#include "mvf/charts.hpp"
#include "mvf/green.hpp"

namespace mvf {

// Omega_r(x0) = {Gamma*(., x0) > level(r)} and its boundary psi_r(x0).
class LevelSetRegion {
 public:
  LevelSetRegion(GreenFunction green, Vec center, double r);

  const GreenFunction& green() const { return green_; }
  const Vec& center() const { return center_; }
  double r() const { return r_; }
  double level() const { return level_; }
  GeometryKind kind() const { return green_.kind(); }

  // Euclidean kinds: distance from the center to psi_r along omega, found by
  // bracketed root finding for star-shaped kinds. Throws Geometry when the
  // root is not bracketed or the ray meets the surface tangentially.
  double ray_radius(const Vec& omega) const;
  // Korányi kind: gauge radius of psi_r about the center.
  double gauge_radius() const;

  bool contains(const Vec& x) const;

  std::vector<SurfaceNode> surface_nodes(const QuadratureSpec& quad) const;
  VolumeRule volume_nodes(const QuadratureSpec& quad, double singularity) const;

 private:
  GreenFunction green_;
  Vec center_;
  double r_;
  double level_;
};

// x0 + y, or x0 o y on a Carnot group. The catalog kernels are translation
// invariant, so formulas are evaluated on regions about the origin with the
// data moved by this map; distances to the pole then carry no cancellation.
Vec translate(const GreenFunction& g, const Vec& x0, const Vec& y);

enum class Measure { EuclideanHausdorff, CarnotPerimeter };

using Integrand = std::function<double(const Vec&)>;

// int integrand dH_e^{N-1}, or int integrand |Phi^T n| dH_e^{N-1} on a Carnot
// group (points where the weight vanishes contribute nothing).
Estimate surface_integral(const LevelSetRegion& region, const Integrand& f, Measure measure,
                          const QuadratureSpec& quad);

// int_{Omega_r} f dx for f with a pole of order at most `singularity` at the
// center. Error: companion-rule difference, or the Monte Carlo standard error.
// Nodes are absolute points, so for strong poles center the region at the
// origin and move the data with translate().
Estimate volume_integral(const LevelSetRegion& region, const Integrand& f, const QuadratureSpec& quad,
                         double singularity);

// Surface rule weighted for the requested measure.
std::vector<VolumeNode> weighted_surface(const LevelSetRegion& region, Measure measure, const QuadratureSpec& quad);

struct CoareaSides {
  Estimate surface_side;  // int_0^r rho^{D-1} int_{psi_rho} K u dH d rho
  Estimate volume_side;   // (1/D) int_{Omega_r} M u dx
};

CoareaSides coarea_shell_check(const GreenFunction& green, const Vec& x0, double r, const ScalarField& u,
                               const QuadratureSpec& quad);

}  // namespace mvf
