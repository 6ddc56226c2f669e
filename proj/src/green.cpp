#include "mvf/green.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mvf/catalog_name.hpp"
#include "mvf/error.hpp"

namespace mvf {

namespace {

constexpr double kPi = std::numbers::pi;

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string join(const Vec& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v(i));
  return s;
}

Vec zeros(int n) { return Vec::Zero(n); }

void check_pole(double dist) {
  if (!(dist > GreenFunction::kPoleExclusion)) {
    throw Error(ErrorKind::SingularKernel, "evaluation at the pole of the fundamental solution");
  }
}

// Radial profile g(d) with first and second derivatives.
struct Radial {
  double g, g1, g2;
};

Vec radial_gradient(const Radial& p, const Vec& r, double d) { return Vec((p.g1 / d) * r); }

Mat radial_hessian(const Radial& p, const Vec& r, double d) {
  const int n = static_cast<int>(r.size());
  const Vec u = r / d;
  const Mat uu = u * u.transpose();
  return Mat(p.g2 * uu + (p.g1 / d) * (Mat::Identity(n, n) - uu));
}

}  // namespace

std::string_view to_string(GeometryKind kind) {
  switch (kind) {
    case GeometryKind::Sphere: return "sphere";
    case GeometryKind::Ellipsoid: return "ellipsoid";
    case GeometryKind::StarShaped: return "star-shaped";
    case GeometryKind::Koranyi: return "koranyi";
  }
  return "unknown";
}

GreenFunction::GreenFunction(Parts parts) : p_(std::move(parts)) {
  if (p_.dim < 2 || p_.dim > kMaxDim) throw Error(ErrorKind::InvalidArgument, "Green function dimension out of range");
  if (!p_.value || !p_.gradient || !p_.hessian) {
    throw Error(ErrorKind::InvalidArgument, "Green function needs value, gradient and hessian");
  }
  if (p_.b.size() == 0) p_.b = zeros(p_.dim);
  if (!p_.group) {
    const Vec origin = zeros(p_.dim);
    certificate_ = normalize_by_flux(*this, origin, euclidean_sphere(origin, 0.5), QuadratureSpec{});
  }
}

int GreenFunction::homogeneous_dim() const { return is_carnot() ? p_.group->homogeneous_dim() : p_.dim; }

const StratifiedGroup& GreenFunction::group() const {
  if (!p_.group) throw Error(ErrorKind::InvalidArgument, p_.name + " is not defined on a Carnot group");
  return *p_.group;
}

double GreenFunction::value(const Vec& x, const Vec& y) const { return p_.value(x, y); }
Vec GreenFunction::gradient(const Vec& x, const Vec& y) const { return p_.gradient(x, y); }
Mat GreenFunction::hessian(const Vec& x, const Vec& y) const { return p_.hessian(x, y); }

Vec GreenFunction::horizontal_gradient(const Vec& x, const Vec& y) const {
  const Vec g = p_.gradient(x, y);
  return is_carnot() ? horizontal_part(*p_.group, x, g) : g;
}

double GreenFunction::level(double r) const {
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "radius parameter must be positive");
  if (logarithmic()) return std::log(1.0 / r);
  return std::pow(r, 2.0 - homogeneous_dim());
}

double GreenFunction::ray_radius(const Vec& omega, double level) const {
  if (!p_.ray_radius) throw Error(ErrorKind::Geometry, p_.name + " has no closed-form level set");
  return p_.ray_radius(omega, level);
}

double GreenFunction::gauge_radius(double level) const {
  if (!p_.gauge_radius) throw Error(ErrorKind::Geometry, p_.name + " has no gauge level set");
  return p_.gauge_radius(level);
}

double GreenFunction::radius_guess(double level) const {
  const int d = homogeneous_dim();
  if (logarithmic()) return std::exp(-2.0 * kPi * level);
  return std::pow(1.0 / ((d - 2) * unit_sphere_area(d) * level), 1.0 / (d - 2));
}

ScalarField GreenFunction::field(const Vec& y) const {
  const GreenFunction self = *this;
  return ScalarField(
             p_.dim, [self, y](const Vec& x) { return self.value(x, y); },
             [self, y](const Vec& x) { return self.gradient(x, y); },
             [self, y](const Vec& x) { return self.hessian(x, y); })
      .with_label(p_.name);
}

GreenFunction GreenFunction::scaled(double factor) const {
  if (!(factor > 0.0)) throw Error(ErrorKind::InvalidArgument, "scale factor must be positive");
  Parts q = p_;
  const Parts base = p_;
  q.value = [base, factor](const Vec& x, const Vec& y) { return factor * base.value(x, y); };
  q.gradient = [base, factor](const Vec& x, const Vec& y) { return Vec(factor * base.gradient(x, y)); };
  q.hessian = [base, factor](const Vec& x, const Vec& y) { return Mat(factor * base.hessian(x, y)); };
  if (base.ray_radius) {
    q.ray_radius = [base, factor](const Vec& w, double level) { return base.ray_radius(w, level / factor); };
  }
  if (base.gauge_radius) {
    q.gauge_radius = [base, factor](double level) { return base.gauge_radius(level / factor); };
  }
  q.name = format_number(factor) + "*" + p_.name;
  GreenFunction out(std::move(q));
  out.certificate_ = {factor * certificate_.value, factor * certificate_.error};
  out.folland_c0_ = factor * folland_c0_;
  return out;
}

EllipticOperator GreenFunction::euclidean_operator() const {
  if (is_carnot()) throw Error(ErrorKind::Mismatch, p_.name + " pairs with a subelliptic operator");
  std::vector<ScalarField> b;
  for (int i = 0; i < p_.dim; ++i) b.push_back(ScalarField::constant(p_.dim, p_.b(i)));
  return EllipticOperator(MatrixField::constant(p_.a, p_.dim), std::move(b), ScalarField::constant(p_.dim, p_.c),
                          p_.lambda, p_.Lambda);
}

SubellipticOperator GreenFunction::carnot_operator() const {
  return SubellipticOperator(group(), MatrixField::constant(p_.a, p_.dim), p_.lambda, p_.Lambda);
}

namespace {

GreenFunction::Parts radial_parts(std::string name, std::string op, int n, std::function<Radial(double)> profile) {
  GreenFunction::Parts p;
  p.name = std::move(name);
  p.operator_name = std::move(op);
  p.dim = n;
  p.a = Mat::Identity(n, n);
  p.value = [profile](const Vec& x, const Vec& y) {
    const double d = (x - y).norm();
    check_pole(d);
    return profile(d).g;
  };
  p.gradient = [profile](const Vec& x, const Vec& y) {
    const Vec r = x - y;
    const double d = r.norm();
    check_pole(d);
    return radial_gradient(profile(d), r, d);
  };
  p.hessian = [profile](const Vec& x, const Vec& y) {
    const Vec r = x - y;
    const double d = r.norm();
    check_pole(d);
    return radial_hessian(profile(d), r, d);
  };
  return p;
}

}  // namespace

GreenFunction gamma_laplace(int n) {
  if (n < 2 || n > kMaxDim) throw Error(ErrorKind::InvalidArgument, "laplace kernel needs 2 <= N <= 6");
  if (n == 2) return gamma_log2d();
  const double c = 1.0 / ((n - 2) * unit_sphere_area(n));
  auto p = radial_parts("laplace:" + std::to_string(n), "laplace:" + std::to_string(n), n, [n, c](double d) {
    const double g = c * std::pow(d, 2 - n);
    return Radial{g, (2 - n) * g / d, (2 - n) * (1 - n) * g / (d * d)};
  });
  p.ray_radius = [n, c](const Vec&, double level) { return std::pow(c / level, 1.0 / (n - 2)); };
  return GreenFunction(std::move(p));
}

GreenFunction gamma_log2d() {
  const double c = 1.0 / (2.0 * kPi);
  auto p = radial_parts("log2d", "laplace:2", 2, [c](double d) {
    return Radial{c * std::log(1.0 / d), -c / d, c / (d * d)};
  });
  p.ray_radius = [](const Vec&, double level) { return std::exp(-2.0 * kPi * level); };
  return GreenFunction(std::move(p));
}

GreenFunction gamma_const_coeff(const Mat& a) {
  const int n = static_cast<int>(a.rows());
  if (n < 3 || a.cols() != n) throw Error(ErrorKind::InvalidArgument, "constant-coefficient kernel needs N >= 3");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-14) throw Error(ErrorKind::InvalidArgument, "A must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  if (!(es.eigenvalues().minCoeff() > 0.0)) throw Error(ErrorKind::InvalidArgument, "A must be positive definite");
  const Mat ainv = a.inverse();
  const double c = 1.0 / ((n - 2) * unit_sphere_area(n) * std::sqrt(a.determinant()));
  GreenFunction::Parts p;
  std::string tag;
  if (a.isDiagonal()) {
    tag = "constA:diag=" + join(a.diagonal());
  } else {
    tag = "constA:m=" + join(Eigen::Map<const Eigen::VectorXd>(Eigen::MatrixXd(a).data(), n * n));
  }
  p.name = tag;
  p.operator_name = tag;
  p.dim = n;
  p.kind = GeometryKind::Ellipsoid;
  p.a = a;
  p.lambda = 0.5 * es.eigenvalues().minCoeff();
  p.Lambda = 2.0 * es.eigenvalues().maxCoeff();
  p.value = [=](const Vec& x, const Vec& y) {
    const Vec r = x - y;
    check_pole(r.norm());
    return c * std::pow(r.dot(ainv * r), 0.5 * (2 - n));
  };
  p.gradient = [=](const Vec& x, const Vec& y) {
    const Vec r = x - y;
    check_pole(r.norm());
    const Vec ar = ainv * r;
    return Vec(c * (2 - n) * std::pow(r.dot(ar), -0.5 * n) * ar);
  };
  p.hessian = [=](const Vec& x, const Vec& y) {
    const Vec r = x - y;
    check_pole(r.norm());
    const Vec ar = ainv * r;
    const double q = r.dot(ar);
    return Mat(c * (2 - n) * (std::pow(q, -0.5 * n) * ainv - n * std::pow(q, -0.5 * n - 1.0) * ar * ar.transpose()));
  };
  p.ray_radius = [=](const Vec& omega, double level) {
    return std::pow(c / level, 1.0 / (n - 2)) / std::sqrt(omega.dot(ainv * omega));
  };
  return GreenFunction(std::move(p));
}

GreenFunction gamma_yukawa(double k) {
  if (!(k > 0.0)) throw Error(ErrorKind::InvalidArgument, "yukawa parameter must be positive");
  auto p = radial_parts("yukawa:k=" + format_number(k), "yukawa:k=" + format_number(k), 3, [k](double d) {
    const double g = std::exp(-k * d) / (4.0 * kPi * d);
    const double s = k + 1.0 / d;
    return Radial{g, -g * s, g * (s * s + 1.0 / (d * d))};
  });
  p.kind = GeometryKind::StarShaped;
  p.c = -k * k;
  return GreenFunction(std::move(p));
}

GreenFunction gamma_drift(const Vec& b) {
  if (b.size() != 3) throw Error(ErrorKind::InvalidArgument, "drift kernel is defined on R^3");
  const double kappa = 0.5 * b.norm();
  const Vec half = 0.5 * b;
  auto w = [kappa](double d) {
    const double g = std::exp(-kappa * d) / (4.0 * kPi * d);
    const double s = kappa + 1.0 / d;
    return Radial{g, -g * s, g * (s * s + 1.0 / (d * d))};
  };
  GreenFunction::Parts p;
  p.name = "drift:b=" + join(b);
  p.operator_name = p.name;
  p.dim = 3;
  p.kind = GeometryKind::StarShaped;
  p.a = Mat::Identity(3, 3);
  p.b = b;
  // e^{<b, r>/2} w(|r|), w the Yukawa kernel with k = |b|/2
  p.value = [=](const Vec& x, const Vec& y) {
    const Vec r = x - y;
    const double d = r.norm();
    check_pole(d);
    return std::exp(half.dot(r)) * w(d).g;
  };
  p.gradient = [=](const Vec& x, const Vec& y) {
    const Vec r = x - y;
    const double d = r.norm();
    check_pole(d);
    const Radial q = w(d);
    return Vec(std::exp(half.dot(r)) * (q.g * half + radial_gradient(q, r, d)));
  };
  p.hessian = [=](const Vec& x, const Vec& y) {
    const Vec r = x - y;
    const double d = r.norm();
    check_pole(d);
    const Radial q = w(d);
    const Vec gw = radial_gradient(q, r, d);
    return Mat(std::exp(half.dot(r)) *
               (q.g * half * half.transpose() + half * gw.transpose() + gw * half.transpose() + radial_hessian(q, r, d)));
  };
  return GreenFunction(std::move(p));
}

GreenFunction gamma_folland(const StratifiedGroup& group) {
  if (group.name() != "heisenberg1") throw Error(ErrorKind::InvalidArgument, "Folland kernel is built for H^1");
  // G(p) = S^{-1/2}, S = |z|^4 + t^2, evaluated at p = y^{-1} o x.
  struct Gauge {
    double s;
    Vec ds;
    Mat hs;
  };
  auto gauge = [](const Vec& p) {
    const double x = p(0), y = p(1), t = p(2);
    const double q = x * x + y * y;
    Gauge g;
    g.s = q * q + t * t;
    g.ds = make_vec({4.0 * x * q, 4.0 * y * q, 2.0 * t});
    g.hs = Mat::Zero(3, 3);
    g.hs(0, 0) = 4.0 * q + 8.0 * x * x;
    g.hs(1, 1) = 4.0 * q + 8.0 * y * y;
    g.hs(0, 1) = g.hs(1, 0) = 8.0 * x * y;
    g.hs(2, 2) = 2.0;
    return g;
  };
  auto build = [group, gauge](double c0) {
    GreenFunction::Parts p;
    p.name = "folland:h1";
    p.operator_name = "sublaplacian:h1";
    p.dim = 3;
    p.kind = GeometryKind::Koranyi;
    p.group = group;
    p.a = Mat::Identity(2, 2);
    p.b = zeros(3);
    p.value = [group, c0](const Vec& x, const Vec& y) {
      const Vec q = group.compose(group.inverse(y), x);
      check_pole(q.norm());
      const double z2 = q(0) * q(0) + q(1) * q(1);
      return c0 / std::sqrt(z2 * z2 + q(2) * q(2));
    };
    p.gradient = [group, gauge, c0](const Vec& x, const Vec& y) {
      const Vec yi = group.inverse(y);
      const Vec q = group.compose(yi, x);
      check_pole(q.norm());
      const Gauge g = gauge(q);
      const Mat j = group.left_translation_jacobian(yi);
      return Vec(j.transpose() * (-0.5 * c0 * std::pow(g.s, -1.5) * g.ds));
    };
    p.hessian = [group, gauge, c0](const Vec& x, const Vec& y) {
      const Vec yi = group.inverse(y);
      const Vec q = group.compose(yi, x);
      check_pole(q.norm());
      const Gauge g = gauge(q);
      const Mat j = group.left_translation_jacobian(yi);
      const Mat h = c0 * (0.75 * std::pow(g.s, -2.5) * g.ds * g.ds.transpose() - 0.5 * std::pow(g.s, -1.5) * g.hs);
      return Mat(j.transpose() * h * j);
    };
    p.gauge_radius = [c0](double level) { return std::sqrt(c0 / level); };
    return p;
  };
  const Vec origin = zeros(3);
  const QuadratureSpec quad;
  GreenFunction raw(build(1.0));
  const Estimate flux = normalize_by_flux(raw, origin, koranyi_sphere(group, origin, 1.0), quad);
  const double c0 = 1.0 / flux.value;
  GreenFunction g(build(c0));
  g.folland_c0_ = c0;
  // Certified on an independent (Euclidean) surface.
  g.certificate_ = normalize_by_flux(g, origin, euclidean_sphere(origin, 1.0), quad);
  return g;
}

SurfaceBuilder euclidean_sphere(const Vec& center, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorKind::Geometry, "sphere radius must be positive");
  return [center, radius](const QuadratureSpec& quad, bool with_interior) {
    FluxSurface s;
    s.center = center;
    const RayRadius ray = [radius](const Vec&) { return radius; };
    s.nodes = star_surface(center, ray, [center](const Vec& x) { return Vec(x - center); }, quad);
    if (with_interior) s.interior = star_volume(center, ray, quad, static_cast<double>(center.size()) - 2.0);
    s.encloses = [center, radius](const Vec& x) { return (x - center).norm() < radius * (1.0 - 1e-9); };
    return s;
  };
}

SurfaceBuilder koranyi_sphere(const StratifiedGroup& group, const Vec& center, double R) {
  if (!(R > 0.0)) throw Error(ErrorKind::Geometry, "Korányi radius must be positive");
  return [group, center, R](const QuadratureSpec& quad, bool with_interior) {
    FluxSurface s;
    s.center = center;
    s.nodes = koranyi_surface(group, center, R, quad);
    if (with_interior) s.interior = koranyi_volume(group, center, R, quad, 2.0);
    const ScalarField rho = koranyi_gauge();
    s.encloses = [group, center, R, rho](const Vec& x) {
      return rho.value(group.compose(group.inverse(center), x)) < R * (1.0 - 1e-9);
    };
    return s;
  };
}

namespace {

double flux_once(const GreenFunction& g, const Vec& pole, const FluxSurface& s) {
  CompensatedSum total_area;
  CompensatedSum flux;
  Vec closure = Vec::Zero(g.dim());
  for (const SurfaceNode& node : s.nodes) {
    closure += node.area;
    total_area.add(node.area.norm());
    Vec field;
    if (g.is_carnot()) {
      const Mat phi = g.group().fields(node.x);
      field = phi * (g.A() * (phi.transpose() * g.gradient(node.x, pole)));
    } else {
      field = g.A() * g.gradient(node.x, pole);
      if (g.has_drift()) field -= g.value(node.x, pole) * g.b();
    }
    flux.add(-field.dot(node.area));
  }
  if (closure.norm() > 1e-8 * total_area.value()) throw Error(ErrorKind::Geometry, "flux surface is not closed");
  double v = flux.value();
  if (g.c() != 0.0) {
    v -= g.c() * integrate(s.interior, [&](const Vec& x) { return g.value(x, pole); }).value;
  }
  return v;
}

}  // namespace

Estimate normalize_by_flux(const GreenFunction& g, const Vec& pole, const SurfaceBuilder& surface,
                           const QuadratureSpec& quad) {
  quad.validate();
  const bool interior = g.c() != 0.0;
  const FluxSurface fine = surface(quad, interior);
  if (!fine.encloses(pole)) throw Error(ErrorKind::Geometry, "flux surface does not enclose the pole");
  if (interior && (fine.center - pole).norm() > 1e-14) {
    throw Error(ErrorKind::Geometry, "zero-order flux correction needs the pole at the surface center");
  }
  for (const SurfaceNode& node : fine.nodes) {
    if ((node.x - pole).norm() < 1e-6) throw Error(ErrorKind::Geometry, "flux surface touches the pole");
  }
  Estimate e;
  e.value = flux_once(g, pole, fine);
  if (quad.estimate_error) e.error = std::abs(e.value - flux_once(g, pole, surface(quad.coarse(), interior)));
  return e;
}

BoundsReport validate_bounds(const GreenFunction& g, std::size_t samples, std::uint64_t seed, double alpha) {
  const int n = g.dim();
  BoundsReport rep;
  rep.alpha = alpha;
  rep.samples = samples;
  auto draw_pairs = [&](std::uint64_t s) {
    Rng rng(s);
    std::vector<std::pair<Vec, Vec>> pairs;
    while (pairs.size() < samples) {
      Vec x(n), y(n);
      for (int k = 0; k < n; ++k) x(k) = rng.uniform();
      for (int k = 0; k < n; ++k) y(k) = rng.uniform();
      if ((x - y).norm() > 1e-9) pairs.emplace_back(x, y);
    }
    return pairs;
  };
  const auto fit = draw_pairs(derive_seed(seed, 0));
  const auto audit = draw_pairs(derive_seed(seed, 1));
  constexpr double kSafety = 1.25;

  if (g.is_carnot()) {
    const WeightsFit w = d_infty_weights_fit(g.group(), 2000, derive_seed(seed, 2));
    const HomogeneousNorm norm(g.group(), w.weights);
    const int q = g.homogeneous_dim();
    rep.exponents = "Q-2=" + std::to_string(q - 2);
    double c = 0.0;
    for (const auto& [x, y] : fit) c = std::max(c, g.value(x, y) / (1.0 + std::pow(norm.distance(x, y), 2.0 - q)));
    rep.c_plus = kSafety * c;
    for (const auto& [x, y] : audit) {
      const double v = g.value(x, y);
      if (v < 0.0 || v > rep.c_plus * (1.0 + std::pow(norm.distance(x, y), 2.0 - q))) ++rep.violations;
    }
    return rep;
  }

  const bool log = g.logarithmic();
  auto ell = [&](double d) { return log ? std::log(1.0 / d) : std::pow(d, 2.0 - n); };
  const double delta = 1e-5;
  rep.c_minus = rep.grad_c_minus = std::numeric_limits<double>::infinity();
  rep.c_plus = rep.grad_c_plus = 0.0;
  auto near_pole = [&](const Vec& y, const Vec& omega) {
    const double c = (g.value(y + delta * omega, y) - g.value(y + 2.0 * delta * omega, y)) / (ell(delta) - ell(2.0 * delta));
    const double gc = g.gradient(y + delta * omega, y).norm() * std::pow(delta, n - 1);
    rep.c_minus = std::min(rep.c_minus, c);
    rep.c_plus = std::max(rep.c_plus, c);
    rep.grad_c_minus = std::min(rep.grad_c_minus, gc);
    rep.grad_c_plus = std::max(rep.grad_c_plus, gc);
  };
  for (const auto& [x, y] : fit) near_pole(y, (x - y).normalized());
  // The quadratic forms in the constant-coefficient kernels are extremal on the eigenvectors of A.
  const Eigen::SelfAdjointEigenSolver<Mat> es(g.A());
  for (int k = 0; k < n; ++k) {
    for (double sgn : {-1.0, 1.0}) near_pole(fit.front().second, Vec(sgn * es.eigenvectors().col(k)));
  }
  const double sl = std::sqrt(g.lambda()), sL = std::sqrt(g.Lambda());
  struct Slack {
    double value, grad;
  };
  auto slack = [&](const Vec& x, const Vec& y) {
    const double d = (x - y).norm();
    const double v = g.value(x, y);
    const double gn = g.gradient(x, y).norm();
    double lo, hi, scale;
    if (log) {
      lo = rep.c_minus * std::log(sl / d);
      hi = rep.c_plus * std::log(sL / d);
      scale = std::pow(d, 0.5 * alpha);
    } else {
      lo = rep.c_minus * std::pow(d, 2.0 - n);
      hi = rep.c_plus * std::pow(d, 2.0 - n);
      scale = std::pow(d, -(n - 2.0 - alpha));
    }
    const double tol = 1e-12 * std::abs(v);
    const double sv = std::max({lo - v - tol, v - hi - tol, 0.0}) / scale;
    const double glo = rep.grad_c_minus * std::pow(d, 1.0 - n);
    const double ghi = rep.grad_c_plus * std::pow(d, 1.0 - n);
    const double gtol = 1e-12 * gn;
    const double sg = std::max({glo - gn - gtol, gn - ghi - gtol, 0.0}) / std::pow(d, -(n - 1.0 - alpha));
    return Slack{sv, sg};
  };
  for (const auto& [x, y] : fit) {
    const Slack s = slack(x, y);
    rep.c0 = std::max(rep.c0, s.value);
    rep.grad_c0 = std::max(rep.grad_c0, s.grad);
  }
  rep.c0 *= kSafety;
  rep.grad_c0 *= kSafety;
  for (const auto& [x, y] : audit) {
    const Slack s = slack(x, y);
    if (s.value > rep.c0 || s.grad > rep.grad_c0) ++rep.violations;
  }
  rep.exponents = log ? "log, N-1=1, alpha/2" : "N-2=" + std::to_string(n - 2) + ", N-1=" + std::to_string(n - 1);
  return rep;
}

Estimate reproduction_identity_check(const GreenFunction& g, const ScalarField& u, const Vec& y,
                                     const QuadratureSpec& quad) {
  if (u.is_zero()) return {};
  if (!u.support()) throw Error(ErrorKind::Support, "reproduction check needs a compactly supported field");
  const Ball& supp = *u.support();
  const double offset = (supp.center - y).norm();
  if (!(offset < supp.radius)) throw Error(ErrorKind::Support, "evaluation point must lie inside the support");

  if (g.is_carnot()) {
    const StratifiedGroup& grp = g.group();
    const SubellipticOperator op = g.carnot_operator();
    const ScalarField rho = koranyi_gauge();
    const Vec yi = grp.inverse(y);
    double R = 0.0;
    const SphereRule sphere = sphere_rule(3, 16, 32);
    for (const Vec& w : sphere.directions) {
      for (double t : {0.25, 0.5, 0.75, 1.0}) {
        R = std::max(R, rho.value(grp.compose(yi, Vec(supp.center + t * supp.radius * w))));
      }
    }
    R *= 1.2;
    auto run = [&](const QuadratureSpec& q) {
      const VolumeRule rule = koranyi_volume(grp, y, R, q, 2.0);
      return integrate(rule, [&](const Vec& x) {
        if ((x - supp.center).norm() >= supp.radius) return 0.0;
        return g.value(x, y) * apply_subelliptic(op, u, x);
      });
    };
    Estimate e = run(quad);
    if (quad.mc_samples == 0 && quad.estimate_error) e.error = std::abs(e.value - run(quad.coarse()).value);
    return {std::abs(u.value(y) + e.value), e.error};
  }

  const EllipticOperator op = g.euclidean_operator();
  const double R = offset + supp.radius;
  const RayRadius ray = [R](const Vec&) { return R; };
  auto run = [&](const QuadratureSpec& q) {
    const VolumeRule rule = star_volume(y, ray, q, g.logarithmic() ? 0.0 : g.dim() - 2.0);
    return integrate(rule, [&](const Vec& x) {
      if ((x - supp.center).norm() >= supp.radius) return 0.0;
      return g.value(x, y) * apply_operator(op, u, x);
    });
  };
  Estimate e = run(quad);
  if (quad.estimate_error) e.error = std::abs(e.value - run(quad.coarse()).value);
  return {std::abs(u.value(y) + e.value), e.error};
}

GreenFunction make_green(const std::string& text) {
  const CatalogName n = parse_catalog_name(text);
  if (n.family == "laplace") {
    if (n.values.size() != 1) throw Error(ErrorKind::Config, "laplace needs a dimension, e.g. laplace:3");
    return gamma_laplace(static_cast<int>(n.values[0]));
  }
  if (n.family == "log2d") return gamma_log2d();
  if (n.family == "yukawa") {
    if (n.values.size() != 1) throw Error(ErrorKind::Config, "yukawa needs k, e.g. yukawa:k=1");
    return gamma_yukawa(n.values[0]);
  }
  if (n.family == "drift") {
    if (n.values.size() != 3) throw Error(ErrorKind::Config, "drift needs b, e.g. drift:b=1,0,0");
    return gamma_drift(make_vec({n.values[0], n.values[1], n.values[2]}));
  }
  if (n.family == "constA") {
    if (n.key == "diag") {
      Vec d(static_cast<int>(n.values.size()));
      for (std::size_t i = 0; i < n.values.size(); ++i) d(static_cast<int>(i)) = n.values[i];
      return gamma_const_coeff(Mat(d.asDiagonal()));
    }
    const int dim = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n.values.size()))));
    if (n.key != "m" || dim * dim != static_cast<int>(n.values.size())) {
      throw Error(ErrorKind::Config, "constA needs diag=... or m=<row-major N*N entries>");
    }
    Mat a(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) a(i, j) = n.values[i * dim + j];
    }
    return gamma_const_coeff(a);
  }
  if (n.family == "folland") {
    if (n.key != "h1") throw Error(ErrorKind::Config, "only folland:h1 is available");
    return gamma_folland(StratifiedGroup::heisenberg());
  }
  throw Error(ErrorKind::Config, "unknown Green function '" + text + "'");
}

}  // namespace mvf
