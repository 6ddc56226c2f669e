#include "mvf/region.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>

#include "mvf/error.hpp"
#include "mvf/kernels.hpp"

namespace mvf {

LevelSetRegion::LevelSetRegion(GreenFunction green, Vec center, double r)
    : green_(std::move(green)), center_(std::move(center)), r_(r) {
  if (center_.size() != green_.dim()) throw Error(ErrorKind::InvalidArgument, "center has the wrong dimension");
  level_ = green_.level(r);
  if (green_.logarithmic() && !(r < 1.0)) {
    throw Error(ErrorKind::Geometry, "the logarithmic kernel is positive on Omega_r only for r < 1; reduce r");
  }
}

double LevelSetRegion::ray_radius(const Vec& omega) const {
  if (kind() == GeometryKind::Koranyi) throw Error(ErrorKind::Geometry, "Korányi regions are not parametrized by rays");
  if (green_.has_ray_radius()) return green_.ray_radius(omega, level_);

  auto f = [&](double t) { return green_.value(Vec(center_ + t * omega), center_) - level_; };
  const std::string hint = " (r = " + std::to_string(r_) + "); reduce r";
  double hi = green_.radius_guess(level_);
  int guard = 0;
  while (f(hi) >= 0.0) {
    hi *= 2.0;
    if (++guard > 60) throw Error(ErrorKind::Geometry, "level set not bracketed along a ray" + hint);
  }
  double lo = 0.5 * hi;
  guard = 0;
  while (f(lo) <= 0.0) {
    lo *= 0.5;
    if (++guard > 60) throw Error(ErrorKind::Geometry, "level set not bracketed near the pole" + hint);
  }
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
  const double t = 0.5 * (a + b);
  if (iters >= 200) throw Error(ErrorKind::Geometry, "root finding did not converge" + hint);
  // Star-shapedness: the ray stays inside before the root and crosses transversally.
  for (double s : {0.2, 0.4, 0.6, 0.8}) {
    if (f(s * t) <= 0.0) throw Error(ErrorKind::Geometry, "region is not star-shaped about its center" + hint);
  }
  if (!(green_.gradient(Vec(center_ + t * omega), center_).dot(omega) < 0.0)) {
    throw Error(ErrorKind::Geometry, "level set is tangent to a ray" + hint);
  }
  return t;
}

double LevelSetRegion::gauge_radius() const { return green_.gauge_radius(level_); }

bool LevelSetRegion::contains(const Vec& x) const {
  if ((x - center_).norm() <= GreenFunction::kPoleExclusion) return true;
  return green_.value(x, center_) > level_;
}

std::vector<SurfaceNode> LevelSetRegion::surface_nodes(const QuadratureSpec& quad) const {
  quad.validate();
  if (kind() == GeometryKind::Koranyi) return koranyi_surface(green_.group(), center_, gauge_radius(), quad);
  return star_surface(
      center_, [this](const Vec& w) { return ray_radius(w); },
      [this](const Vec& x) { return green_.gradient(x, center_); }, quad);
}

VolumeRule LevelSetRegion::volume_nodes(const QuadratureSpec& quad, double singularity) const {
  quad.validate();
  if (kind() == GeometryKind::Koranyi) {
    return koranyi_volume(green_.group(), center_, gauge_radius(), quad, singularity);
  }
  return star_volume(center_, [this](const Vec& w) { return ray_radius(w); }, quad, singularity);
}

std::vector<VolumeNode> weighted_surface(const LevelSetRegion& region, Measure measure, const QuadratureSpec& quad) {
  const std::vector<SurfaceNode> nodes = region.surface_nodes(quad);
  std::vector<VolumeNode> out;
  out.reserve(nodes.size());
  const bool carnot = measure == Measure::CarnotPerimeter;
  if (carnot && !region.green().is_carnot()) {
    throw Error(ErrorKind::Mismatch, "perimeter measure needs a Carnot group");
  }
  for (const SurfaceNode& n : nodes) {
    const double w = carnot ? horizontal_part(region.green().group(), n.x, n.area).norm() : n.area.norm();
    out.push_back({n.x, w});
  }
  return out;
}

namespace {

double sum_surface(const LevelSetRegion& region, const Integrand& f, Measure measure, const QuadratureSpec& quad) {
  CompensatedSum s;
  for (const VolumeNode& n : weighted_surface(region, measure, quad)) {
    if (n.weight == 0.0) continue;
    s.add(n.weight * f(n.x));
  }
  return s.value();
}

}  // namespace

Estimate surface_integral(const LevelSetRegion& region, const Integrand& f, Measure measure,
                          const QuadratureSpec& quad) {
  Estimate e{sum_surface(region, f, measure, quad), 0.0};
  if (quad.estimate_error) e.error = std::abs(e.value - sum_surface(region, f, measure, quad.coarse()));
  return e;
}

Estimate volume_integral(const LevelSetRegion& region, const Integrand& f, const QuadratureSpec& quad,
                         double singularity) {
  const VolumeRule rule = region.volume_nodes(quad, singularity);
  Estimate e = integrate(rule, f);
  if (!rule.monte_carlo && quad.estimate_error) {
    e.error = std::abs(e.value - integrate(region.volume_nodes(quad.coarse(), singularity), f).value);
  }
  return e;
}

Vec translate(const GreenFunction& g, const Vec& x0, const Vec& y) {
  return g.is_carnot() ? g.group().compose(x0, y) : Vec(x0 + y);
}

namespace {

Measure measure_for(const GreenFunction& g) {
  return g.is_carnot() ? Measure::CarnotPerimeter : Measure::EuclideanHausdorff;
}

double shell_side(const GreenFunction& green, const Vec& x0, double r, const ScalarField& u,
                  const QuadratureSpec& quad) {
  const int d = green.homogeneous_dim();
  const Vec origin = Vec::Zero(green.dim());
  const GaussRule outer = gauss_legendre(quad.rho_order, 0.0, r);
  QuadratureSpec inner = quad;
  inner.estimate_error = false;
  CompensatedSum s;
  for (std::size_t j = 0; j < outer.nodes.size(); ++j) {
    const double rho = outer.nodes[j];
    const LevelSetRegion shell(green, origin, rho);
    const double v = sum_surface(
        shell, [&](const Vec& y) { return surface_kernel(green, origin, y) * u.value(translate(green, x0, y)); },
        measure_for(green), inner);
    s.add(outer.weights[j] * std::pow(rho, d - 1) * v);
  }
  return s.value();
}

}  // namespace

CoareaSides coarea_shell_check(const GreenFunction& green, const Vec& x0, double r, const ScalarField& u,
                               const QuadratureSpec& quad) {
  CoareaSides out;
  out.surface_side.value = shell_side(green, x0, r, u, quad);
  if (quad.estimate_error) {
    out.surface_side.error = std::abs(out.surface_side.value - shell_side(green, x0, r, u, quad.coarse()));
  }
  const int d = green.homogeneous_dim();
  const Vec origin = Vec::Zero(green.dim());
  const LevelSetRegion region(green, origin, r);
  const Estimate v = volume_integral(
      region, [&](const Vec& y) { return volume_kernel(green, origin, y) * u.value(translate(green, x0, y)); }, quad,
      volume_kernel_singularity(green));
  out.volume_side = {v.value / d, v.error / d};
  return out;
}

}  // namespace mvf
