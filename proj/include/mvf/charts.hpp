#pragma once

#include <functional>
#include <vector>

#include "mvf/carnot.hpp"
#include "mvf/quadrature.hpp"

namespace mvf {

// A surface quadrature node: `area` is the outward unit normal times the
// Euclidean area weight dH_e^{N-1}.
struct SurfaceNode {
  Vec x;
  Vec area;
};

struct VolumeNode {
  Vec x;
  double weight = 0.0;
};

struct VolumeRule {
  std::vector<VolumeNode> nodes;
  bool monte_carlo = false;
  bool antithetic = false;  // Monte Carlo nodes come in mirrored pairs (2i, 2i + 1)
};

using RayRadius = std::function<double(const Vec& omega)>;
using NormalField = std::function<Vec(const Vec& x)>;

// Nodes and weights for int_0^T g(rho) rho^{D-1} d rho when g ~ rho^{-sigma}
// near 0. Integer powers are integrated directly on graded panels; other
// powers go through rho = T v^{1/(D-sigma)}.
struct RadialRule {
  std::vector<double> rho;
  std::vector<double> weight;
};
RadialRule radial_rule(int power_dim, double outer, double singularity, const QuadratureSpec& quad);

// Surface x0 + t(omega) omega. `normal` may return any nonzero multiple of the
// normal; orientation follows from star-shapedness.
std::vector<SurfaceNode> star_surface(const Vec& x0, const RayRadius& radius, const NormalField& normal,
                                      const QuadratureSpec& quad);
VolumeRule star_volume(const Vec& x0, const RayRadius& radius, const QuadratureSpec& quad, double singularity);

// Korányi sphere/ball of radius R about x0 on H^1, charted by
//   p(s, alpha, phi) = (s sqrt(cos a) cos phi, s sqrt(cos a) sin phi, s^2 sin a),
// whose volume element is s^3 ds da dphi. The latitude is sampled through
// a = (pi/2) sin(pi w / 2) so that sqrt(cos a) is smooth in w.
Vec koranyi_point(double s, double alpha, double phi);
std::vector<SurfaceNode> koranyi_surface(const StratifiedGroup& g, const Vec& x0, double R,
                                         const QuadratureSpec& quad);
// Deterministic chart rule when quad.mc_samples == 0; otherwise Latin
// hypercube Monte Carlo with radial density proportional to s^{3 - singularity},
// each draw p paired with its inverse -p.
VolumeRule koranyi_volume(const StratifiedGroup& g, const Vec& x0, double R, const QuadratureSpec& quad,
                          double singularity);

// Sum of weight * f over the rule; Monte Carlo rules also report the sample
// standard error (over pair sums for antithetic rules).
Estimate integrate(const VolumeRule& rule, const std::function<double(const Vec&)>& f);

}  // namespace mvf
