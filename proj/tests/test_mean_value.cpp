#include <doctest.h>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>

#include "mvf/error.hpp"
#include "mvf/kernels.hpp"
#include "mvf/mean_value.hpp"
#include "samples.hpp"

using namespace mvf;
using std::numbers::pi;

namespace {

struct Pair {
  const char* op;
  const char* green;
};

const Pair kEuclidean[] = {{"laplace:3", "laplace:3"},
                           {"laplace:2", "log2d"},
                           {"constA:diag=4,1,1", "constA:diag=4,1,1"},
                           {"yukawa:k=1", "yukawa:k=1"},
                           {"drift:b=1,0,0", "drift:b=1,0,0"}};

double radius_for(const GreenFunction& g) { return g.logarithmic() ? 0.5 : 1.0; }

// Spherical average of u over |x - c| = d by a product rule written here.
double sphere_average(const ScalarField& u, const Vec& c, double d) {
  using GL = boost::math::quadrature::gauss<double, 30>;
  const int nphi = 60;
  double s = 0.0;
  for (int k = 0; k < nphi; ++k) {
    const double phi = 2.0 * pi * k / nphi;
    s += GL::integrate(
        [&](double th) {
          const Vec x = c + d * make_vec({std::sin(th) * std::cos(phi), std::sin(th) * std::sin(phi), std::cos(th)});
          return u.value(x) * std::sin(th);
        },
        0.0, pi);
  }
  return s * (2.0 * pi / nphi) / (4.0 * pi);
}

}  // namespace

TEST_SUITE("mean_value") {

TEST_CASE("kernel values") {
  const Vec o = Vec::Zero(3);
  const GreenFunction g = gamma_laplace(3);
  for (const Vec& x : box_samples(100, 3, 80)) {
    const double d = x.norm();
    CHECK(kernel_K(g, o, x) == doctest::Approx(1.0 / (4.0 * pi * d * d)).epsilon(1e-13));
    CHECK(kernel_M(g, o, x) == doctest::Approx(48.0 * pi * pi).epsilon(1e-12));
  }
  const GreenFunction g2 = gamma_log2d();
  for (const Vec& x : box_samples(100, 2, 81)) {
    const double d = x.norm();
    CHECK(kernel_K2(g2, Vec::Zero(2), x) == doctest::Approx(1.0 / (2.0 * pi * d)).epsilon(1e-13));
    CHECK(kernel_M2(g2, Vec::Zero(2), x) ==
          doctest::Approx(std::pow(d, 1.0 / pi) / (2.0 * pi * pi * d * d)).epsilon(1e-12));
  }
  const GreenFunction f = gamma_folland(StratifiedGroup::heisenberg());
  for (const Vec& x : box_samples(100, 3, 82)) {
    const double gam = f.value(x, o);
    const double h2 = f.horizontal_gradient(x, o).squaredNorm();
    CHECK(kernel_MG(f, o, x) == doctest::Approx(2.0 * h2 / (gam * gam * gam)).epsilon(1e-12));
    CHECK(kernel_KG(f, o, x) >= 0.0);
  }
  CHECK(kernel_KG(f, o, make_vec({0, 0, 0.5})) == 0.0);
  CHECK_THROWS_AS(kernel_M(g2, Vec::Zero(2), make_vec({0.1, 0.0})), Error);
}

TEST_CASE("manufactured right-hand sides match the operator") {
  for (const Pair& p : kEuclidean) {
    const GreenFunction g = make_green(p.green);
    const CatalogOperator op = make_operator(p.op);
    for (const ManufacturedSolution& s : manufactured_suite(g)) {
      CAPTURE(s.name);
      for (const Vec& x : box_samples(20, g.dim(), 83)) {
        CHECK(apply_operator(*op.euclidean, s.u, x) == doctest::Approx(s.f.value(x)).epsilon(1e-12));
        if (s.f_zero) CHECK(std::abs(s.f.value(x)) < 1e-12);
      }
    }
  }
  const GreenFunction f = gamma_folland(StratifiedGroup::heisenberg());
  const CatalogOperator sub = make_operator("sublaplacian:h1");
  for (const ManufacturedSolution& s : manufactured_suite(f)) {
    for (const Vec& x : box_samples(20, 3, 84)) {
      CHECK(apply_subelliptic(*sub.carnot, s.u, x) == doctest::Approx(s.f.value(x)).epsilon(1e-12));
    }
  }
  CHECK(find_solution(f, "tx").f.value(make_vec({0.3, 0.5, 0.7})) == doctest::Approx(-2.0));
  CHECK_THROWS_AS(find_solution(f, "exp_kx1"), Error);
}

TEST_CASE("normalization: u = 1 for every pair and formula") {
  const QuadratureSpec q;
  for (const Pair& p : kEuclidean) {
    const GreenFunction g = make_green(p.green);
    const CatalogOperator op = make_operator(p.op);
    const ManufacturedSolution one = find_solution(g, "one");
    const Vec x0 = Vec::Constant(g.dim(), 0.1);
    const double r = radius_for(g);
    CAPTURE(p.green);
    CHECK(mvf_surface(g, op, one, x0, r, q).residual <= 1e-8);
    CHECK(mvf_volume(g, op, one, x0, r, q).residual <= 1e-8);
  }
  const MeanValueReport lap = mvf_surface(gamma_laplace(3), make_operator("laplace:3"),
                                          find_solution(gamma_laplace(3), "one"), make_vec({1, 2, 3}), 0.7, q);
  CHECK(lap.surface == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(lap.residual <= 1e-10);
}

TEST_CASE("classical spherical mean") {
  const GreenFunction g = gamma_laplace(3);
  const ManufacturedSolution s = find_solution(g, "x1sq-x2sq");
  const Vec x0 = make_vec({0.3, -0.1, 0.2});
  const double r = 0.9;
  const MeanValueReport rep = mvf_surface(g, make_operator("laplace:3"), s, x0, r, QuadratureSpec{});
  CHECK(rep.residual <= 1e-8);
  CHECK(rep.surface == doctest::Approx(sphere_average(s.u, x0, r / (4.0 * pi))).epsilon(1e-12));
}

TEST_CASE("yukawa zero-order term") {
  const double k = 1.0, r = 1.0;
  const GreenFunction g = gamma_yukawa(k);
  const MeanValueReport rep =
      mvf_surface(g, make_operator("yukawa:k=1"), find_solution(g, "one"), make_vec({0.2, 0, 0}), r, QuadratureSpec{});
  // The level set is the sphere e^{-k d} / (4 pi d) = 1/r.
  boost::uintmax_t it = 100;
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      [&](double d) { return std::exp(-k * d) / (4.0 * pi * d) - 1.0 / r; }, 1e-6, 1.0,
      boost::math::tools::eps_tolerance<double>(52), it);
  const double d = 0.5 * (lo + hi);
  const double vol = 4.0 * pi / 3.0 * d * d * d;
  CHECK(rep.drift == doctest::Approx(k * k * vol / r).epsilon(1e-12));
  CHECK(rep.residual <= 1e-6);
}

TEST_CASE("harmonic, drift and source solutions") {
  const QuadratureSpec q;
  for (const Pair& p : kEuclidean) {
    const GreenFunction g = make_green(p.green);
    const CatalogOperator op = make_operator(p.op);
    const double r = radius_for(g);
    for (const ManufacturedSolution& s : manufactured_suite(g)) {
      CAPTURE(p.green);
      CAPTURE(s.name);
      const Vec x0 = Vec::LinSpaced(g.dim(), -0.2, 0.3);
      const MeanValueReport a = mvf_surface(g, op, s, x0, r, q);
      const MeanValueReport b = mvf_volume(g, op, s, x0, r, q);
      CHECK(a.residual <= 1e-8);
      CHECK(b.residual <= 1e-8);
      // Surface and volume residuals agree within the combined error estimates.
      CHECK(std::abs(a.residual - b.residual) <= a.err_estimate + b.err_estimate + 1e-15);
    }
  }
  const GreenFunction d = gamma_drift(make_vec({1, 0, 0}));
  const MeanValueReport e = mvf_volume(d, make_operator("drift:b=1,0,0"), find_solution(d, "exp_minus_bx"),
                                       make_vec({0.1, 0.2, 0.3}), 0.8, q);
  CHECK(e.residual <= 1e-6);
  CHECK(e.lhs == doctest::Approx(std::exp(-0.1)));
}

TEST_CASE("residuals stay small on a dyadic sweep in r") {
  Mat a = Vec(make_vec({4, 1, 1})).asDiagonal();
  const GreenFunction g = gamma_const_coeff(a);
  const CatalogOperator op = make_operator("constA:diag=4,1,1");
  const ManufacturedSolution s = find_solution(g, "normsq");
  const Vec x0 = make_vec({0.1, 0.2, -0.3});
  double prev = 0.0;
  for (double r : {1.0, 0.5, 0.25}) {
    const MeanValueReport rep = mvf_surface(g, op, s, x0, r, QuadratureSpec{});
    CHECK(rep.residual <= 1e-8);
    CHECK(rep.residual <= std::max(prev, 1e-10));
    prev = std::max(prev, rep.residual);
  }
}

TEST_CASE("linearity in (u, f)") {
  const GreenFunction g = gamma_drift(make_vec({1, 0, 0}));
  const CatalogOperator op = make_operator("drift:b=1,0,0");
  const ManufacturedSolution u = find_solution(g, "normsq");
  const ManufacturedSolution w = find_solution(g, "x1x2");
  const double al = 1.5, be = -2.0;
  const ManufacturedSolution mix{"mix", linear_combination(al, u.u, be, w.u), linear_combination(al, u.f, be, w.f), false};
  const Vec x0 = make_vec({0.1, 0.0, -0.2});
  const QuadratureSpec q;
  for (auto fn : {&mvf_surface, &mvf_volume}) {
    const double rm = fn(g, op, mix, x0, 0.7, q).rhs;
    const double ru = fn(g, op, u, x0, 0.7, q).rhs;
    const double rw = fn(g, op, w, x0, 0.7, q).rhs;
    CHECK(std::abs(rm - (al * ru + be * rw)) <= 1e-12);
  }
}

TEST_CASE("Heisenberg group, Monte Carlo volume formula") {
  const GreenFunction f = gamma_folland(StratifiedGroup::heisenberg());
  const CatalogOperator op = make_operator("sublaplacian:h1");
  QuadratureSpec mc;
  mc.mc_samples = 1000000;
  mc.seed = 85;
  const MeanValueReport x = mvf_volume(f, op, find_solution(f, "x"), Vec::Zero(3), 1.0, mc);
  CHECK(x.residual <= 1e-3);
  mc.mc_samples = 200000;
  const MeanValueReport tx = mvf_volume(f, op, find_solution(f, "tx"), make_vec({0.2, 0.1, -0.1}), 1.0, mc);
  CHECK(tx.residual <= 1e-3);
  const MeanValueReport txs = mvf_surface(f, op, find_solution(f, "tx"), make_vec({0.2, 0.1, -0.1}), 1.0, mc);
  CHECK(txs.residual <= 1e-3);
  CHECK(txs.drift == 0.0);
}

TEST_CASE("pairing") {
  CHECK_THROWS_AS(check_pairing(make_operator("drift:b=1,0,0"), gamma_yukawa(1.0)), Error);
  CHECK_THROWS_AS(check_pairing(make_operator("laplace:3"), gamma_folland(StratifiedGroup::heisenberg())), Error);
  CHECK_THROWS_AS(check_pairing(make_operator("constA:diag=4,1,1"), gamma_laplace(3)), Error);
  CHECK_NOTHROW(check_pairing(make_operator("constA:diag=1,1,1"), gamma_laplace(3)));
  try {
    check_pairing(make_operator("yukawa:k=2"), gamma_yukawa(1.0));
    FAIL("expected a mismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Mismatch);
  }
  CHECK_THROWS_AS(make_operator("heat:3"), Error);
  CHECK(setting_name(gamma_log2d()) == "euclidean-2");
  CHECK(setting_name(gamma_folland(StratifiedGroup::heisenberg())) == "heisenberg");
}

}  // TEST_SUITE
