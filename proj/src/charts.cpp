#include "mvf/charts.hpp"

#include <cmath>
#include <numbers>

#include "mvf/error.hpp"

namespace mvf {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_nonnegative_integer(double a) { return a > -1e-12 && std::abs(a - std::round(a)) < 1e-12; }

}  // namespace

RadialRule radial_rule(int power_dim, double outer, double singularity, const QuadratureSpec& quad) {
  if (!(singularity < power_dim)) {
    throw Error(ErrorKind::InvalidArgument, "singularity exponent must be below the dimension");
  }
  if (!(outer > 0.0)) throw Error(ErrorKind::Geometry, "radial extent must be positive");
  RadialRule r;
  const double a = power_dim - 1 - singularity;
  const bool direct = is_nonnegative_integer(a);
  const PanelRule panels = graded_panels(quad.radial_panels, 0.0, direct ? outer : 1.0);
  const double e = power_dim - singularity;
  for (std::size_t i = 0; i < panels.nodes.size(); ++i) {
    const double w = quad.embedded_radial ? panels.gauss[i] : panels.kronrod[i];
    if (w == 0.0) continue;
    const double t = panels.nodes[i];
    if (direct) {
      r.rho.push_back(t);
      r.weight.push_back(w * std::pow(t, power_dim - 1));
    } else {
      r.rho.push_back(outer * std::pow(t, 1.0 / e));
      r.weight.push_back(w * std::pow(outer, power_dim) / e * std::pow(t, singularity / e));
    }
  }
  return r;
}

std::vector<SurfaceNode> star_surface(const Vec& x0, const RayRadius& radius, const NormalField& normal,
                                      const QuadratureSpec& quad) {
  const int n = static_cast<int>(x0.size());
  const SphereRule sphere = sphere_rule(n, quad.polar_order, quad.azimuth_order);
  std::vector<SurfaceNode> nodes;
  nodes.reserve(sphere.directions.size());
  for (std::size_t i = 0; i < sphere.directions.size(); ++i) {
    const Vec& omega = sphere.directions[i];
    const double t = radius(omega);
    const Vec x = x0 + t * omega;
    const Vec nv = normal(x);
    const double cosine = nv.dot(omega);
    if (!(std::abs(cosine) > 1e-14 * nv.norm())) {
      throw Error(ErrorKind::Geometry, "surface is tangent to a ray from the center; reduce r");
    }
    nodes.push_back({x, Vec(nv * (std::pow(t, n - 1) / cosine * sphere.weights[i]))});
  }
  return nodes;
}

VolumeRule star_volume(const Vec& x0, const RayRadius& radius, const QuadratureSpec& quad, double singularity) {
  const int n = static_cast<int>(x0.size());
  const SphereRule sphere = sphere_rule(n, quad.polar_order, quad.azimuth_order);
  const RadialRule unit = radial_rule(n, 1.0, singularity, quad);
  VolumeRule rule;
  rule.nodes.reserve(sphere.directions.size() * unit.rho.size());
  for (std::size_t i = 0; i < sphere.directions.size(); ++i) {
    const Vec& omega = sphere.directions[i];
    const double t = radius(omega);
    const double scale = std::pow(t, n) * sphere.weights[i];
    for (std::size_t k = 0; k < unit.rho.size(); ++k) {
      rule.nodes.push_back({Vec(x0 + (t * unit.rho[k]) * omega), unit.weight[k] * scale});
    }
  }
  return rule;
}

Vec koranyi_point(double s, double alpha, double phi) {
  const double rc = std::sqrt(std::max(0.0, std::cos(alpha)));
  return make_vec({s * rc * std::cos(phi), s * rc * std::sin(phi), s * s * std::sin(alpha)});
}

namespace {

struct Latitude {
  std::vector<double> alpha;
  std::vector<double> weight;  // includes d alpha / d w
};

Latitude latitude_rule(int order) {
  const GaussRule g = gauss_legendre(order, -1.0, 1.0);
  Latitude lat;
  for (int i = 0; i < order; ++i) {
    const double w = g.nodes[i];
    lat.alpha.push_back(0.5 * kPi * std::sin(0.5 * kPi * w));
    lat.weight.push_back(g.weights[i] * 0.25 * kPi * kPi * std::cos(0.5 * kPi * w));
  }
  return lat;
}

void require_heisenberg(const StratifiedGroup& g) {
  if (g.dim() != 3 || g.step() != 2) throw Error(ErrorKind::InvalidArgument, "Korányi charts live on H^1");
}

}  // namespace

std::vector<SurfaceNode> koranyi_surface(const StratifiedGroup& g, const Vec& x0, double R,
                                         const QuadratureSpec& quad) {
  require_heisenberg(g);
  if (!(R > 0.0)) throw Error(ErrorKind::Geometry, "Korányi radius must be positive");
  const Latitude lat = latitude_rule(quad.polar_order);
  const int naz = std::max(quad.azimuth_order, 3);
  const double wphi = 2.0 * kPi / naz;
  // Area vectors transform by the cofactor of the (unimodular) translation Jacobian.
  const Mat cof = g.left_translation_jacobian(x0).inverse().transpose();
  std::vector<SurfaceNode> nodes;
  nodes.reserve(lat.alpha.size() * naz);
  for (std::size_t i = 0; i < lat.alpha.size(); ++i) {
    const double a = lat.alpha[i];
    const double c = std::cos(a);
    const double c32 = c * std::sqrt(c);
    for (int k = 0; k < naz; ++k) {
      const double phi = 2.0 * kPi * (k + 0.5) / naz;
      const Vec p = koranyi_point(R, a, phi);
      // d_alpha p x d_phi p, flipped to point outward
      const Vec area0 = make_vec({R * R * R * c32 * std::cos(phi), R * R * R * c32 * std::sin(phi), 0.5 * R * R * std::sin(a)});
      nodes.push_back({g.compose(x0, p), Vec(cof * area0 * (lat.weight[i] * wphi))});
    }
  }
  return nodes;
}

VolumeRule koranyi_volume(const StratifiedGroup& g, const Vec& x0, double R, const QuadratureSpec& quad,
                          double singularity) {
  require_heisenberg(g);
  constexpr int q = 4;
  if (!(singularity < q)) throw Error(ErrorKind::InvalidArgument, "singularity exponent must be below Q");
  if (!(R > 0.0)) throw Error(ErrorKind::Geometry, "Korányi radius must be positive");
  VolumeRule rule;
  if (quad.mc_samples > 0) {
    rule.monte_carlo = true;
    rule.antithetic = true;
    const std::size_t pairs = (quad.mc_samples + 1) / 2;
    const std::vector<double> u = latin_hypercube(pairs, 3, quad.seed);
    const double e = q - singularity;
    const double scale = 2.0 * kPi * kPi * std::pow(R, e) / (e * static_cast<double>(2 * pairs));
    rule.nodes.reserve(2 * pairs);
    for (std::size_t i = 0; i < pairs; ++i) {
      const double s = R * std::pow(u[3 * i], 1.0 / e);
      const double a = kPi * (u[3 * i + 1] - 0.5);
      const double phi = 2.0 * kPi * u[3 * i + 2];
      const double w = scale * std::pow(s, singularity);
      rule.nodes.push_back({g.compose(x0, koranyi_point(s, a, phi)), w});
      rule.nodes.push_back({g.compose(x0, koranyi_point(s, -a, phi + kPi)), w});
    }
    return rule;
  }
  const RadialRule radial = radial_rule(q, R, singularity, quad);
  const Latitude lat = latitude_rule(quad.polar_order);
  const int naz = std::max(quad.azimuth_order, 3);
  const double wphi = 2.0 * kPi / naz;
  rule.nodes.reserve(radial.rho.size() * lat.alpha.size() * naz);
  for (std::size_t j = 0; j < radial.rho.size(); ++j) {
    for (std::size_t i = 0; i < lat.alpha.size(); ++i) {
      for (int k = 0; k < naz; ++k) {
        const double phi = 2.0 * kPi * (k + 0.5) / naz;
        rule.nodes.push_back({g.compose(x0, koranyi_point(radial.rho[j], lat.alpha[i], phi)),
                              radial.weight[j] * lat.weight[i] * wphi});
      }
    }
  }
  return rule;
}

Estimate integrate(const VolumeRule& rule, const std::function<double(const Vec&)>& f) {
  CompensatedSum sum;
  std::vector<double> terms;
  if (rule.monte_carlo) terms.reserve(rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = rule.nodes[i].weight * f(rule.nodes[i].x);
    sum.add(t);
    if (!rule.monte_carlo) continue;
    if (rule.antithetic && i % 2 == 1) {
      terms.back() += t;
    } else {
      terms.push_back(t);
    }
  }
  Estimate est{sum.value(), 0.0};
  if (rule.monte_carlo && terms.size() > 1) {
    const double n = static_cast<double>(terms.size());
    CompensatedSum var;
    for (double t : terms) {
      const double d = n * t - est.value;
      var.add(d * d);
    }
    est.error = std::sqrt(var.value() / (n - 1.0) / n);
  }
  return est;
}

}  // namespace mvf
