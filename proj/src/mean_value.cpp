#include "mvf/mean_value.hpp"

#include <chrono>
#include <cmath>

#include "mvf/catalog_name.hpp"
#include "mvf/error.hpp"
#include "mvf/kernels.hpp"

namespace mvf {

namespace {

ScalarField value_only(int dim, ScalarField::ValueFn f) { return ScalarField(dim, std::move(f)); }

ManufacturedSolution make(std::string name, ScalarField u, ScalarField f, bool f_zero) {
  u.with_label(name);
  return {std::move(name), std::move(u), std::move(f), f_zero};
}

std::vector<ManufacturedSolution> euclidean_suite(const GreenFunction& g) {
  const int n = g.dim();
  const Mat a = g.A();
  const Vec b = g.b();
  const double c = g.c();
  const bool no_b = !g.has_drift();
  const bool no_c = c == 0.0;
  std::vector<ManufacturedSolution> out;
  out.push_back(make("one", ScalarField::constant(n, 1.0), ScalarField::constant(n, c), no_c));
  out.push_back(make("x1", fields::coordinate(n, 0),
                     value_only(n, [b, c](const Vec& x) { return b(0) + c * x(0); }), no_b && no_c));
  out.push_back(make("x1sq-x2sq", fields::harmonic_quadratic(n),
                     value_only(n,
                                [a, b, c](const Vec& x) {
                                  return 2.0 * (a(0, 0) - a(1, 1)) + 2.0 * b(0) * x(0) - 2.0 * b(1) * x(1) +
                                         c * (x(0) * x(0) - x(1) * x(1));
                                }),
                     a(0, 0) == a(1, 1) && no_b && no_c));
  out.push_back(make("x1x2", fields::product(n, 0, 1),
                     value_only(n,
                                [a, b, c](const Vec& x) {
                                  return 2.0 * a(0, 1) + b(0) * x(1) + b(1) * x(0) + c * x(0) * x(1);
                                }),
                     a(0, 1) == 0.0 && no_b && no_c));
  out.push_back(make("normsq", fields::squared_norm(n),
                     value_only(n,
                                [a, b, c](const Vec& x) {
                                  return 2.0 * a.trace() + 2.0 * b.dot(x) + c * x.squaredNorm();
                                }),
                     false));
  if (c < 0.0) {
    // e^{k x1} with A11 k^2 + b1 k + c = 0 on the positive root
    const double k = (-b(0) + std::sqrt(b(0) * b(0) - 4.0 * a(0, 0) * c)) / (2.0 * a(0, 0));
    Vec dir = Vec::Zero(n);
    dir(0) = k;
    const double coef = a(0, 0) * k * k + b(0) * k + c;
    out.push_back(make("exp_kx1", fields::exponential(dir),
                       value_only(n, [coef, k](const Vec& x) { return coef * std::exp(k * x(0)); }), true));
  }
  if (!no_b) {
    const double coef = b.dot(a * b) - b.dot(b) + c;
    out.push_back(make("exp_minus_bx", fields::exponential(Vec(-b)),
                       value_only(n, [coef, b](const Vec& x) { return coef * std::exp(-b.dot(x)); }),
                       std::abs(coef) < 1e-15));
  }
  return out;
}

std::vector<ManufacturedSolution> heisenberg_suite(const GreenFunction& g) {
  if (!g.A().isIdentity(0.0)) throw Error(ErrorKind::InvalidArgument, "the H^1 suite is written for the sub-Laplacian");
  const ScalarField zero = ScalarField::zero(3);
  std::vector<ManufacturedSolution> out;
  out.push_back(make("one", ScalarField::constant(3, 1.0), zero, true));
  out.push_back(make("x", fields::coordinate(3, 0), zero, true));
  out.push_back(make("y", fields::coordinate(3, 1), zero, true));
  out.push_back(make("t", fields::coordinate(3, 2), zero, true));
  out.push_back(make("xsq-ysq", fields::harmonic_quadratic(3), zero, true));
  out.push_back(make("xy", fields::product(3, 0, 1), zero, true));
  out.push_back(make("xsq", fields::product(3, 0, 0), ScalarField::constant(3, 2.0), false));
  out.push_back(make("tx", fields::product(3, 2, 0), value_only(3, [](const Vec& x) { return -4.0 * x(1); }), false));
  return out;
}

}  // namespace

std::vector<ManufacturedSolution> manufactured_suite(const GreenFunction& g) {
  return g.is_carnot() ? heisenberg_suite(g) : euclidean_suite(g);
}

ManufacturedSolution find_solution(const GreenFunction& g, const std::string& name) {
  for (auto& s : manufactured_suite(g)) {
    if (s.name == name) return s;
  }
  throw Error(ErrorKind::Config, "no manufactured solution '" + name + "' for " + g.name());
}

CatalogOperator make_operator(const std::string& text) {
  const CatalogName n = parse_catalog_name(text);
  CatalogOperator op;
  op.name = text;
  if (n.family == "laplace") {
    if (n.values.size() != 1) throw Error(ErrorKind::Config, "laplace needs a dimension, e.g. laplace:3");
    op.euclidean = operators::laplacian(static_cast<int>(n.values[0]));
  } else if (n.family == "constA") {
    Mat a;
    if (n.key == "diag") {
      Vec d(static_cast<int>(n.values.size()));
      for (std::size_t i = 0; i < n.values.size(); ++i) d(static_cast<int>(i)) = n.values[i];
      a = d.asDiagonal();
    } else {
      const int dim = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n.values.size()))));
      if (n.key != "m" || dim * dim != static_cast<int>(n.values.size())) {
        throw Error(ErrorKind::Config, "constA needs diag=... or m=<row-major N*N entries>");
      }
      a.resize(dim, dim);
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) a(i, j) = n.values[i * dim + j];
      }
    }
    op.euclidean = operators::constant_coefficient(a);
  } else if (n.family == "yukawa") {
    if (n.values.size() != 1) throw Error(ErrorKind::Config, "yukawa needs k, e.g. yukawa:k=1");
    op.euclidean = operators::yukawa(n.values[0]);
  } else if (n.family == "drift") {
    if (n.values.size() != 3) throw Error(ErrorKind::Config, "drift needs b, e.g. drift:b=1,0,0");
    op.euclidean = operators::drift(make_vec({n.values[0], n.values[1], n.values[2]}));
  } else if (n.family == "sublaplacian") {
    if (n.key != "h1") throw Error(ErrorKind::Config, "only sublaplacian:h1 is available");
    op.carnot = SubellipticOperator::sublaplacian(StratifiedGroup::heisenberg());
  } else {
    throw Error(ErrorKind::Config, "unknown operator '" + text + "'");
  }
  return op;
}

void check_pairing(const CatalogOperator& op, const GreenFunction& g) {
  const std::string what = op.name + " does not pair with " + g.name();
  if (static_cast<bool>(op.carnot) != g.is_carnot()) throw Error(ErrorKind::Mismatch, what + " (setting)");
  const int n = g.dim();
  const Vec pole = Vec::Zero(n);
  std::vector<Vec> points;
  for (int k = 0; k < n; ++k) {
    Vec x = Vec::Constant(n, 0.1);
    x(k) = 0.3;
    points.push_back(x);
    points.push_back(Vec(-x));
  }
  const ScalarField gamma = g.field(pole);
  for (const Vec& x : points) {
    double residual;
    if (op.carnot) {
      if (op.carnot->group().name() != g.group().name()) throw Error(ErrorKind::Mismatch, what + " (group)");
      if ((op.carnot->A().value(x) - g.A()).cwiseAbs().maxCoeff() > 1e-12) {
        throw Error(ErrorKind::Mismatch, what + " (A)");
      }
      residual = apply_subelliptic_adjoint(*op.carnot, gamma, x);
    } else {
      const EllipticOperator& e = *op.euclidean;
      if (e.dim() != n) throw Error(ErrorKind::Mismatch, what + " (dimension)");
      if ((e.A().value(x) - g.A()).cwiseAbs().maxCoeff() > 1e-12) throw Error(ErrorKind::Mismatch, what + " (A)");
      for (int i = 0; i < n; ++i) {
        if (std::abs(e.b()[i].value(x) - g.b()(i)) > 1e-12) throw Error(ErrorKind::Mismatch, what + " (b)");
      }
      if (std::abs(e.c().value(x) - g.c()) > 1e-12) throw Error(ErrorKind::Mismatch, what + " (c)");
      residual = apply_adjoint(e, gamma, x);
    }
    const double scale = std::abs(gamma.value(x)) / x.squaredNorm() + 1.0;
    if (std::abs(residual) > 1e-6 * scale) throw Error(ErrorKind::Mismatch, what + " (adjoint residual)");
  }
}

std::string setting_name(const GreenFunction& g) {
  return g.is_carnot() ? "heisenberg" : "euclidean-" + std::to_string(g.dim());
}

namespace {

using Clock = std::chrono::steady_clock;

// (div b - c)(x); empty when it vanishes identically for the operator.
std::function<double(const Vec&)> zero_order_density(const CatalogOperator& op) {
  if (!op.euclidean) return {};
  const EllipticOperator e = *op.euclidean;
  if (!e.has_drift() && !e.has_zero_order()) return {};
  auto q = [e](const Vec& x) {
    return e.divergence_b(x) - (e.has_zero_order() ? e.c().value(x) : 0.0);
  };
  const int n = e.dim();
  bool all_zero = true;
  for (int k = 0; k < 4 && all_zero; ++k) all_zero = q(Vec::Constant(n, 0.37 * k - 0.5)) == 0.0;
  if (all_zero) return {};
  return q;
}

double source_singularity(const GreenFunction& g) {
  return g.logarithmic() ? 0.0 : g.homogeneous_dim() - 2.0;
}

MeanValueReport start_report(const GreenFunction& g, const CatalogOperator& op, const ManufacturedSolution& sol,
                             const Vec& x0, double r, const QuadratureSpec& quad, std::string formula) {
  check_pairing(op, g);
  if (x0.size() != g.dim()) throw Error(ErrorKind::InvalidArgument, "center has the wrong dimension");
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "radius must be positive");
  quad.validate();
  MeanValueReport rep;
  rep.setting = setting_name(g);
  rep.op = op.name;
  rep.green = g.name();
  rep.solution = sol.name;
  rep.formula = std::move(formula);
  rep.x0 = x0;
  rep.r = r;
  rep.seed = quad.seed;
  rep.lhs = sol.u.value(x0);
  return rep;
}

void finish(MeanValueReport& rep, Clock::time_point t0) {
  rep.rhs = rep.surface + rep.source + rep.drift;
  rep.residual = std::abs(rep.lhs - rep.rhs);
  rep.err_estimate = rep.err_surface + rep.err_source + rep.err_drift;
  rep.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
}

// (D / r^D) int_0^r rho^{D-1} int_{Omega_rho(0)} h(rho, y) dy d rho
Estimate iterated_term(const GreenFunction& g, double r, const QuadratureSpec& quad,
                       const std::function<double(double, const Vec&)>& h, double singularity) {
  const int d = g.homogeneous_dim();
  auto once = [&](const QuadratureSpec& q, double& mc_err) {
    const GaussRule outer = gauss_legendre(q.rho_order, 0.0, r);
    QuadratureSpec inner = q;
    inner.estimate_error = false;
    CompensatedSum s;
    mc_err = 0.0;
    for (std::size_t j = 0; j < outer.nodes.size(); ++j) {
      const double rho = outer.nodes[j];
      const LevelSetRegion region(g, Vec::Zero(g.dim()), rho);
      const Estimate e = volume_integral(region, [&](const Vec& x) { return h(rho, x); }, inner, singularity);
      const double w = outer.weights[j] * std::pow(rho, d - 1);
      s.add(w * e.value);
      mc_err += w * e.error;
    }
    const double scale = d / std::pow(r, d);
    mc_err *= scale;
    return scale * s.value();
  };
  double mc_err = 0.0;
  Estimate out{once(quad, mc_err), mc_err};
  if (quad.mc_samples == 0 && quad.estimate_error) {
    double unused = 0.0;
    out.error = std::abs(out.value - once(quad.coarse(), unused));
  }
  return out;
}

}  // namespace

MeanValueReport mvf_surface(const GreenFunction& g, const CatalogOperator& op, const ManufacturedSolution& sol,
                            const Vec& x0, double r, const QuadratureSpec& quad) {
  const auto t0 = Clock::now();
  MeanValueReport rep = start_report(g, op, sol, x0, r, quad, "surface");
  const Vec o = Vec::Zero(g.dim());
  auto at = [&](const Vec& y) { return translate(g, x0, y); };
  const LevelSetRegion region(g, o, r);
  const Measure measure = g.is_carnot() ? Measure::CarnotPerimeter : Measure::EuclideanHausdorff;
  const Estimate s = surface_integral(
      region, [&](const Vec& y) { return surface_kernel(g, o, y) * sol.u.value(at(y)); }, measure, quad);
  rep.surface = s.value;
  rep.err_surface = s.error;
  const double level = region.level();
  if (!sol.f_zero) {
    const Estimate src = volume_integral(
        region, [&](const Vec& y) { return sol.f.value(at(y)) * (level - g.value(y, o)); }, quad,
        source_singularity(g));
    rep.source = src.value;
    rep.err_source = src.error;
  }
  if (const auto q = zero_order_density(op)) {
    const Estimate dr = volume_integral(
        region, [&](const Vec& y) { return q(at(y)) * sol.u.value(at(y)); }, quad, 0.0);
    rep.drift = level * dr.value;
    rep.err_drift = std::abs(level) * dr.error;
  }
  finish(rep, t0);
  return rep;
}

MeanValueReport mvf_volume(const GreenFunction& g, const CatalogOperator& op, const ManufacturedSolution& sol,
                           const Vec& x0, double r, const QuadratureSpec& quad) {
  const auto t0 = Clock::now();
  MeanValueReport rep = start_report(g, op, sol, x0, r, quad, "volume");
  const int d = g.homogeneous_dim();
  const Vec o = Vec::Zero(g.dim());
  auto at = [&](const Vec& y) { return translate(g, x0, y); };
  const LevelSetRegion region(g, o, r);
  const Estimate m = volume_integral(
      region, [&](const Vec& y) { return volume_kernel(g, o, y) * sol.u.value(at(y)); }, quad,
      volume_kernel_singularity(g));
  const double scale = 1.0 / std::pow(r, d);
  rep.surface = scale * m.value;
  rep.err_surface = scale * m.error;
  if (!sol.f_zero) {
    const Estimate src = iterated_term(
        g, r, quad, [&](double rho, const Vec& y) { return sol.f.value(at(y)) * (g.level(rho) - g.value(y, o)); },
        source_singularity(g));
    rep.source = src.value;
    rep.err_source = src.error;
  }
  if (const auto q = zero_order_density(op)) {
    const Estimate dr = iterated_term(
        g, r, quad, [&](double rho, const Vec& y) { return g.level(rho) * q(at(y)) * sol.u.value(at(y)); }, 0.0);
    rep.drift = dr.value;
    rep.err_drift = dr.error;
  }
  finish(rep, t0);
  return rep;
}

}  // namespace mvf
