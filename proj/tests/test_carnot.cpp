#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mvf/carnot.hpp"
#include "mvf/error.hpp"
#include "samples.hpp"

using namespace mvf;

namespace {

const std::vector<StratifiedGroup>& groups() {
  static const std::vector<StratifiedGroup> g{StratifiedGroup::abelian(3), StratifiedGroup::abelian(2),
                                              StratifiedGroup::heisenberg()};
  return g;
}

// X_j u(x) from u along the integral curve s -> x o (s e_j), by central differences.
double flow_derivative(const StratifiedGroup& g, int j, const ScalarField& u, const Vec& x) {
  const double h = 1e-5;
  return (u.value(g.flow(j, x, h)) - u.value(g.flow(j, x, -h))) / (2.0 * h);
}

std::vector<ScalarField> catalog(int n) {
  std::vector<ScalarField> out{fields::coordinate(n, n - 1), fields::product(n, 0, n - 1), fields::squared_norm(n),
                               fields::exponential(Vec::LinSpaced(n, 0.3, -0.4))};
  return out;
}

}  // namespace

TEST_SUITE("carnot_group") {

TEST_CASE("group axioms and dilations on 1e4 triples") {
  for (const StratifiedGroup& g : groups()) {
    CAPTURE(g.name());
    const auto pts = box_samples(30000, g.dim(), 21);
    const Vec e = Vec::Zero(g.dim());
    double worst = 0.0;
    for (std::size_t i = 0; i + 2 < pts.size(); i += 3) {
      const Vec& x = pts[i];
      const Vec& y = pts[i + 1];
      const Vec& z = pts[i + 2];
      worst = std::max(worst, (g.compose(g.compose(x, y), z) - g.compose(x, g.compose(y, z))).cwiseAbs().maxCoeff());
      worst = std::max(worst, (g.compose(x, e) - x).cwiseAbs().maxCoeff());
      worst = std::max(worst, (g.compose(e, x) - x).cwiseAbs().maxCoeff());
      worst = std::max(worst, g.compose(x, g.inverse(x)).cwiseAbs().maxCoeff());
      const double l = 0.25 + 2.0 * std::abs(z(0));
      worst = std::max(worst, (g.dilate(l, g.compose(x, y)) - g.compose(g.dilate(l, x), g.dilate(l, y))).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("homogeneous dimension, generators and rank") {
  const StratifiedGroup h = StratifiedGroup::heisenberg();
  CHECK(h.homogeneous_dim() == 4);
  CHECK(StratifiedGroup::abelian(3).homogeneous_dim() == 3);
  for (const StratifiedGroup& g : groups()) {
    const Mat phi0 = g.fields(Vec::Zero(g.dim()));
    CHECK((phi0 - Mat::Identity(g.dim(), g.horizontal_dim())).cwiseAbs().maxCoeff() == 0.0);
    for (double l : {0.5, 1.7, 3.0}) {
      CHECK(g.dilation_matrix(l).determinant() == doctest::Approx(std::pow(l, g.homogeneous_dim())).epsilon(1e-14));
    }
    for (const Vec& x : box_samples(10000, g.dim(), 22)) REQUIRE(g.hormander_rank(x) == g.dim());
  }
}

TEST_CASE("Heisenberg bracket from a loop of flows") {
  const StratifiedGroup h = StratifiedGroup::heisenberg();
  for (const Vec& x : box_samples(20, 3, 23)) {
    for (double s : {1e-1, 1e-2}) {
      Vec p = h.flow(0, x, s);
      p = h.flow(1, p, s);
      p = h.flow(0, p, -s);
      p = h.flow(1, p, -s);
      const Vec d = (p - x) / (s * s);
      CHECK(d(2) == doctest::Approx(4.0).epsilon(1e-9));
      CHECK(std::abs(d(0)) + std::abs(d(1)) < 1e-9);
    }
  }
}

TEST_CASE("Lie derivatives: hand-expanded values") {
  const StratifiedGroup h = StratifiedGroup::heisenberg();
  const Vec p = make_vec({1, 2, 3});
  CHECK(lie_derivative(h, 0, fields::coordinate(3, 2), p) == doctest::Approx(-4.0));
  CHECK(lie_derivative(h, 1, fields::coordinate(3, 2), p) == doctest::Approx(2.0));
  const Vec g = horizontal_gradient(h, fields::harmonic_quadratic(3), p);
  CHECK(g(0) == doctest::Approx(2.0));
  CHECK(g(1) == doctest::Approx(-4.0));

  const StratifiedGroup r3 = StratifiedGroup::abelian(3);
  const ScalarField u = fields::exponential(make_vec({0.5, -1, 2}));
  for (const Vec& x : box_samples(20, 3, 24)) {
    const Vec grad = u.gradient(x);
    for (int j = 0; j < 3; ++j) CHECK(lie_derivative(r3, j, u, x) == doctest::Approx(grad(j)).epsilon(1e-14));
  }
}

TEST_CASE("Lie derivatives agree with differences along flows") {
  for (const StratifiedGroup& g : groups()) {
    for (const ScalarField& u : catalog(g.dim())) {
      for (const Vec& x : box_samples(100, g.dim(), 25)) {
        for (int j = 0; j < g.horizontal_dim(); ++j) {
          const double a = lie_derivative(g, j, u, x);
          CHECK(std::abs(flow_derivative(g, j, u, x) - a) <= 1e-6 * (1.0 + std::abs(a)));
        }
      }
    }
  }
  const StratifiedGroup h = StratifiedGroup::heisenberg();
  const ScalarField rho = koranyi_gauge();
  for (const Vec& x : box_samples(100, 3, 26)) {
    if (x.head(2).norm() < 0.05) continue;
    const Vec grad = horizontal_gradient(h, rho, x);
    const Vec fd = make_vec({flow_derivative(h, 0, rho, x), flow_derivative(h, 1, rho, x)});
    CHECK(std::abs(fd.norm() - grad.norm()) <= 1e-6 * (1.0 + grad.norm()));
  }
}

TEST_CASE("left invariance and homogeneity of the generators") {
  const StratifiedGroup h = StratifiedGroup::heisenberg();
  const auto pts = box_samples(200, 3, 27);
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    const Vec& x = pts[i];
    const Vec& y = pts[i + 1];
    for (const ScalarField& u : catalog(3)) {
      const ScalarField ul = left_translate(h, u, y);
      const double lam = 0.3 + std::abs(y(2));
      const ScalarField ud = dilate_field(h, u, lam);
      for (int j = 0; j < 2; ++j) {
        const double target = lie_derivative(h, j, u, h.compose(y, x));
        CHECK(std::abs(lie_derivative(h, j, ul, x) - target) <= 1e-8 * (1.0 + std::abs(target)));
        const double hom = lam * lie_derivative(h, j, u, h.dilate(lam, x));
        CHECK(std::abs(lie_derivative(h, j, ud, x) - hom) <= 1e-10 * (1.0 + std::abs(hom)));
      }
    }
  }
}

TEST_CASE("horizontal divergence and the sub-Laplacian") {
  const StratifiedGroup h = StratifiedGroup::heisenberg();
  const StratifiedGroup r3 = StratifiedGroup::abelian(3);
  const std::vector<ScalarField> id{fields::coordinate(3, 0), fields::coordinate(3, 1), fields::coordinate(3, 2)};
  const std::vector<ScalarField> swap{fields::coordinate(3, 1), fields::coordinate(3, 0)};
  const ScalarField q = fields::harmonic_quadratic(3);
  const SubellipticOperator sub = SubellipticOperator::sublaplacian(h);
  for (const Vec& x : box_samples(50, 3, 28)) {
    CHECK(horizontal_divergence(r3, id, x) == doctest::Approx(3.0));
    CHECK(std::abs(horizontal_divergence(h, swap, x)) < 1e-14);
    const Mat hess = horizontal_hessian(h, q, x);
    CHECK(std::abs(hess.trace()) < 1e-12);
    CHECK(std::abs(apply_subelliptic(sub, fields::coordinate(3, 2), x)) < 1e-12);
    CHECK(apply_subelliptic(sub, fields::product(3, 0, 0), x) == doctest::Approx(2.0));
    CHECK(apply_subelliptic(sub, fields::product(3, 2, 0), x) == doctest::Approx(-4.0 * x(1)));
    CHECK(apply_subelliptic_adjoint(sub, fields::product(3, 2, 0), x) == doctest::Approx(-4.0 * x(1)));
    CHECK(sub.b(x).norm() == 0.0);
    CHECK(sub.c(x) == 0.0);
  }
  // Delta_H of the gauge^{-2} vanishes off the pole.
  const ScalarField rho = koranyi_gauge();
  const ScalarField gamma(3, [rho](const Vec& x) { return std::pow(rho.value(x), -2.0); });
  for (const Vec& x : box_samples(50, 3, 29)) {
    if (rho.value(x) < 0.2) continue;
    const Mat hess = fd_hessian([&](const Vec& p) { return gamma.value(p); }, x);
    const Mat phi = h.fields(x);
    double lap = 0.0;
    for (int j = 0; j < 2; ++j) {
      // X_j X_j u = phi_j^T H phi_j + (X_j phi_j) . grad u
      const Vec col = phi.col(j);
      Vec dphi = Vec::Zero(3);
      for (int k = 0; k < 3; ++k) dphi += col(k) * h.field_partial(x, k).col(j);
      lap += col.dot(hess * col) + dphi.dot(gamma.gradient_or_fd(x));
    }
    CHECK(std::abs(lap) < 1e-4 * std::pow(rho.value(x), -4.0));
  }
}

TEST_CASE("homogeneous norm") {
  const StratifiedGroup h = StratifiedGroup::heisenberg();
  const HomogeneousNorm n(h, {1.0, 0.5});
  const auto pts = box_samples(20000, 3, 30);
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    const Vec& x = pts[i];
    const Vec& y = pts[i + 1];
    const double lam = 0.1 + 3.0 * std::abs(y(0));
    CHECK(n.value(h.dilate(lam, x)) == doctest::Approx(lam * n.value(x)).epsilon(1e-14));
    const Vec z = pts[(i + 7) % pts.size()];
    CHECK(n.distance(h.compose(z, x), h.compose(z, y)) == doctest::Approx(n.distance(x, y)).epsilon(1e-12));
  }
}

TEST_CASE("d_infty weights") {
  const WeightsFit ab = d_infty_weights_fit(StratifiedGroup::abelian(3), 10000, 31);
  CHECK(ab.violations == 0);
  CHECK(ab.weights == std::vector<double>{1.0});

  const StratifiedGroup h = StratifiedGroup::heisenberg();
  const WeightsFit fit = d_infty_weights_fit(h, 10000, 32);
  REQUIRE(fit.violations == 0);
  REQUIRE(fit.weights.size() == 2);
  const WeightsFit audit = triangle_audit(HomogeneousNorm(h, fit.weights), 1000000, 33);
  CHECK(audit.violations == 0);
  const WeightsFit halved = triangle_audit(HomogeneousNorm(h, {1.0, 0.5 * fit.weights[1]}), 100000, 34);
  CHECK(halved.violations == 0);
}

TEST_CASE("metric equivalence constants on the unit box") {
  const StratifiedGroup h = StratifiedGroup::heisenberg();
  const HomogeneousNorm n(h, d_infty_weights_fit(h, 10000, 35).weights);
  const MetricEquivalence eq = fit_metric_equivalence(n, 10000, 36);
  MESSAGE("fitted c- = " << eq.c_minus << ", c+ = " << eq.c_plus);
  CHECK(eq.c_minus > 0.0);
  std::size_t bad = 0;
  Rng rng(37);
  for (int s = 0; s < 10000; ++s) {
    Vec x(3), y(3);
    for (int k = 0; k < 3; ++k) {
      x(k) = rng.uniform();
      y(k) = rng.uniform();
    }
    const double e = (x - y).norm();
    const double d = n.distance(x, y);
    if (d < 0.9 * eq.c_minus * e || d > 1.1 * eq.c_plus * std::sqrt(e)) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("spherical factor") {
  const Vec e1_3 = make_vec({1, 0, 0});  // horizontal = whole space for abelian groups
  const SphericalFactor r3 =
      spherical_factor_estimate(HomogeneousNorm::unit_weights(StratifiedGroup::abelian(3)), e1_3, 64, 38);
  CHECK(r3.value == doctest::Approx(std::numbers::pi).epsilon(2e-3));
  const SphericalFactor r2 =
      spherical_factor_estimate(HomogeneousNorm::unit_weights(StratifiedGroup::abelian(2)), make_vec({0, 1}), 64, 39);
  CHECK(r2.value == doctest::Approx(2.0).epsilon(1e-3));

  const StratifiedGroup h = StratifiedGroup::heisenberg();
  const HomogeneousNorm n(h, d_infty_weights_fit(h, 10000, 40).weights);
  const SphericalFactor a = spherical_factor_estimate(n, make_vec({1, 0}), 64, 41);
  const SphericalFactor b = spherical_factor_estimate(n, make_vec({1, 0}), 128, 42);
  CHECK(std::abs(a.value - b.value) <= 0.02 * b.value);
  const SphericalFactor c = spherical_factor_estimate(n, make_vec({0, 1}), 128, 43);
  CHECK(std::abs(c.value - b.value) <= 0.02 * b.value);
}

TEST_CASE("invalid inputs") {
  const StratifiedGroup h = StratifiedGroup::heisenberg();
  CHECK_THROWS_AS(lie_derivative(h, 2, fields::coordinate(3, 0), Vec::Zero(3)), Error);
  CHECK_THROWS_AS(StratifiedGroup::abelian(0), Error);
  CHECK_THROWS_AS(HomogeneousNorm(h, {1.0, -1.0}), Error);
  const ScalarField no_grad(3, [](const Vec& x) { return x(0); });
  CHECK_THROWS_AS(lie_derivative(h, 0, no_grad, Vec::Zero(3)), Error);
}

}  // TEST_SUITE
