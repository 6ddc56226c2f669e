#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "mvf/error.hpp"
#include "mvf/kernels.hpp"
#include "mvf/region.hpp"
#include "samples.hpp"

using namespace mvf;
using std::numbers::pi;

TEST_SUITE("region_geometry") {

TEST_CASE("level sets of the closed-form kernels") {
  const Vec x0 = make_vec({0.1, -0.2, 0.3});
  const LevelSetRegion lap(gamma_laplace(3), x0, 2.0);
  for (const Vec& w : sphere_rule(3, 6, 12).directions) CHECK(lap.ray_radius(w) == doctest::Approx(2.0 / (4.0 * pi)));

  Mat a = Vec(make_vec({4, 1, 1})).asDiagonal();
  const LevelSetRegion ell(gamma_const_coeff(a), x0, 1.0);
  const double r1 = ell.ray_radius(make_vec({1, 0, 0}));
  CHECK(r1 / ell.ray_radius(make_vec({0, 1, 0})) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r1 / ell.ray_radius(make_vec({0, 0, -1})) == doctest::Approx(2.0).epsilon(1e-12));

  const LevelSetRegion plane(gamma_log2d(), make_vec({0.3, 0.4}), 0.5);
  CHECK(plane.ray_radius(make_vec({0.6, 0.8})) == doctest::Approx(std::pow(0.5, 2.0 * pi)).epsilon(1e-12));
}

TEST_CASE("surface nodes lie on the level set") {
  const Vec x0 = make_vec({0.2, 0.0, -0.1});
  Mat a(3, 3);
  a << 3, 0.4, 0, 0.4, 1, 0.2, 0, 0.2, 2;
  for (const GreenFunction& g : {gamma_laplace(3), gamma_const_coeff(a), gamma_yukawa(1.0), gamma_drift(make_vec({1, 0.5, 0})),
                                 gamma_folland(StratifiedGroup::heisenberg())}) {
    CAPTURE(g.name());
    const LevelSetRegion reg(g, x0, 0.8);
    for (const SurfaceNode& n : reg.surface_nodes(QuadratureSpec{})) {
      CHECK(std::abs(g.value(n.x, x0) - reg.level()) <= 1e-10 * reg.level());
    }
  }
}

TEST_CASE("regions are nested") {
  const Vec x0 = make_vec({0.0, 0.1, 0.0});
  QuadratureSpec q;
  q.polar_order = 8;
  q.azimuth_order = 16;
  q.radial_panels = 3;
  for (const GreenFunction& g : {gamma_drift(make_vec({1, 0, 0})), gamma_yukawa(2.0), gamma_folland(StratifiedGroup::heisenberg())}) {
    CAPTURE(g.name());
    const LevelSetRegion outer(g, x0, 1.0);
    for (double rho : {0.25, 0.5, 0.9}) {
      const LevelSetRegion inner(g, x0, rho);
      CHECK(inner.level() > outer.level());
      for (const VolumeNode& n : inner.volume_nodes(q, 0.0).nodes) REQUIRE(outer.contains(n.x));
    }
  }
}

TEST_CASE("surface integrals") {
  const Vec x0 = make_vec({0.5, 0.5, -0.5});
  const QuadratureSpec q;
  const double d = 0.7;
  const LevelSetRegion ball(gamma_laplace(3), x0, 4.0 * pi * d);
  CHECK(surface_integral(ball, [](const Vec&) { return 1.0; }, Measure::EuclideanHausdorff, q).value ==
        doctest::Approx(4.0 * pi * d * d).epsilon(1e-13));
  for (double r : {0.3, 1.0, 2.0}) {
    const LevelSetRegion reg(gamma_laplace(3), x0, r);
    const Estimate k = surface_integral(
        reg, [&](const Vec& x) { return kernel_K(reg.green(), x0, x); }, Measure::EuclideanHausdorff, q);
    CHECK(k.value == doctest::Approx(1.0).epsilon(1e-13));
  }
  const GreenFunction f = gamma_folland(StratifiedGroup::heisenberg());
  const LevelSetRegion kor(f, x0, 0.6);
  const Estimate kg = surface_integral(
      kor, [&](const Vec& x) { return kernel_KG(f, x0, x); }, Measure::CarnotPerimeter, q);
  CHECK(std::abs(kg.value - 1.0) <= 1e-4);
  CHECK_THROWS_AS(surface_integral(ball, [](const Vec&) { return 1.0; }, Measure::CarnotPerimeter, q), Error);
}

TEST_CASE("doubling surface orders stays within the error estimate") {
  Mat a = Vec(make_vec({4, 1, 1})).asDiagonal();
  const GreenFunction g = gamma_const_coeff(a);
  const Vec x0 = make_vec({0.1, 0.2, 0.3});
  const ScalarField u = fields::exponential(make_vec({0.5, -0.3, 0.2}));
  const LevelSetRegion reg(g, x0, 1.0);
  auto integrand = [&](const Vec& x) { return kernel_K(g, x0, x) * u.value(x); };
  QuadratureSpec q;
  q.polar_order = 12;
  q.azimuth_order = 24;
  const Estimate base = surface_integral(reg, integrand, Measure::EuclideanHausdorff, q);
  const Estimate fine = surface_integral(reg, integrand, Measure::EuclideanHausdorff, q.refined(1));
  CHECK(std::abs(fine.value - base.value) <= base.error);
}

TEST_CASE("volume integrals against radial oracles") {
  const Vec x0 = make_vec({0.1, 0.1, 0.1});
  const QuadratureSpec q;
  const GreenFunction g = gamma_laplace(3);
  const double r = 4.0 * pi;  // Euclidean radius 1
  const LevelSetRegion reg(g, x0, r);
  CHECK(volume_integral(reg, [](const Vec&) { return 1.0; }, q, 0.0).value ==
        doctest::Approx(4.0 * pi / 3.0).epsilon(1e-13));
  for (double rr : {0.5, 2.0}) {
    const LevelSetRegion small(g, x0, rr);
    const double m = volume_integral(small, [&](const Vec& x) { return kernel_M(g, x0, x); }, q, 0.0).value;
    CHECK(m == doctest::Approx(rr * rr * rr).epsilon(1e-12));
  }
  // int (1/r - Gamma*) over the unit ball as a 1-d integral in the distance.
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double oracle =
      GK::integrate([&](double s) { return (1.0 / r - 1.0 / (4.0 * pi * s)) * 4.0 * pi * s * s; }, 0.0, 1.0);
  const double v = volume_integral(reg, [&](const Vec& x) { return reg.level() - g.value(x, x0); }, q, 1.0).value;
  CHECK(v == doctest::Approx(oracle).epsilon(1e-10));

  // Centered at the origin: the planar kernel's radial rule puts nodes closer to
  // the center than a nonzero center could resolve.
  const GreenFunction g2 = gamma_log2d();
  const Vec p0 = Vec::Zero(2);
  for (double rr : {0.3, 0.7}) {
    const LevelSetRegion disk(g2, p0, rr);
    const double m = volume_integral(disk, [&](const Vec& x) { return kernel_M2(g2, p0, x); }, q,
                                     volume_kernel_singularity(g2)).value;
    CHECK(m / (rr * rr) == doctest::Approx(1.0).epsilon(1e-9));
  }

  const GreenFunction f = gamma_folland(StratifiedGroup::heisenberg());
  const LevelSetRegion kor(f, x0, 0.8);
  const double mg = volume_integral(kor, [&](const Vec& x) { return kernel_MG(f, x0, x); }, q, 0.0).value;
  CHECK(mg == doctest::Approx(std::pow(0.8, 4)).epsilon(1e-8));
  QuadratureSpec mc;
  mc.mc_samples = 200000;
  mc.seed = 70;
  const Estimate mgmc = volume_integral(kor, [&](const Vec& x) { return kernel_MG(f, x0, x); }, mc, 0.0);
  CHECK(std::abs(mgmc.value - std::pow(0.8, 4)) <= std::max(1e-3, 4.0 * mgmc.error));
}

TEST_CASE("declared singularity must stay below the dimension") {
  const LevelSetRegion reg(gamma_laplace(3), Vec::Zero(3), 1.0);
  CHECK_THROWS_AS(volume_integral(reg, [](const Vec&) { return 1.0; }, QuadratureSpec{}, 3.0), Error);
}

TEST_CASE("Korányi chart and the perimeter weight") {
  const StratifiedGroup h = StratifiedGroup::heisenberg();
  const GreenFunction f = gamma_folland(h);
  const ScalarField rho = koranyi_gauge();
  for (double a : {-1.2, -0.3, 0.0, 0.8, 1.5}) {
    for (double phi : {0.0, 1.0, 4.0}) CHECK(rho.value(koranyi_point(0.9, a, phi)) == doctest::Approx(0.9).epsilon(1e-14));
  }
  // The characteristic points sit on the t-axis; the weighted measure vanishes there.
  for (double sgn : {-1.0, 1.0}) {
    const Vec pole = make_vec({0.0, 0.0, sgn * 0.81});
    CHECK((koranyi_point(0.9, sgn * pi / 2, 0.3) - pole).norm() < 1e-7);
    CHECK(f.horizontal_gradient(pole, Vec::Zero(3)).norm() < 1e-14);
    CHECK(kernel_KG(f, Vec::Zero(3), pole) == 0.0);
    CHECK_THROWS_AS(kernel_KG(f, Vec::Zero(3), pole, ZeroGradient::Throw), Error);
  }
  const LevelSetRegion kor(f, Vec::Zero(3), 0.9);
  const std::vector<VolumeNode> w = weighted_surface(kor, Measure::CarnotPerimeter, QuadratureSpec{});
  const std::vector<VolumeNode> e = weighted_surface(kor, Measure::EuclideanHausdorff, QuadratureSpec{});
  REQUIRE(w.size() == e.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(w[i].weight <= 2.0 * std::max(1.0, std::abs(w[i].x(0)) + std::abs(w[i].x(1))) * e[i].weight + 1e-15);
    if (w[i].x.head(2).norm() < 1e-3) CHECK(w[i].weight < 1e-2 * e[i].weight);
  }
}

TEST_CASE("horizontal divergence theorem on Korányi balls") {
  // g = (x, y) has div_G g = 2, so the volume side is 2 |B|.
  const StratifiedGroup h = StratifiedGroup::heisenberg();
  const GreenFunction f = gamma_folland(h);
  const Vec x0 = make_vec({0.3, -0.2, 0.1});
  const LevelSetRegion kor(f, x0, 0.7);
  const QuadratureSpec q;
  const double vol = 2.0 * volume_integral(kor, [](const Vec&) { return 1.0; }, q, 0.0).value;
  double flux = 0.0;
  for (const SurfaceNode& n : kor.surface_nodes(q)) flux += make_vec({n.x(0), n.x(1)}).dot(horizontal_part(h, n.x, n.area));
  CHECK(std::abs(vol - flux) <= 1e-4);
  const double R = kor.gauge_radius();
  CHECK(vol == doctest::Approx(pi * pi * std::pow(R, 4)).epsilon(1e-10));
}

TEST_CASE("coarea shells") {
  const QuadratureSpec q;
  const Vec x0 = make_vec({0.1, -0.1, 0.2});
  const CoareaSides one = coarea_shell_check(gamma_laplace(3), x0, 1.5, ScalarField::constant(3, 1.0), q);
  CHECK(one.surface_side.value == doctest::Approx(1.5 * 1.5 * 1.5 / 3.0).epsilon(1e-12));
  CHECK(one.volume_side.value == doctest::Approx(1.5 * 1.5 * 1.5 / 3.0).epsilon(1e-12));

  Mat a = Vec(make_vec({4, 1, 1})).asDiagonal();
  for (const GreenFunction& g : {gamma_const_coeff(a), gamma_drift(make_vec({1, 0, 0}))}) {
    const CoareaSides s = coarea_shell_check(g, x0, 1.0, fields::harmonic_quadratic(3), q);
    CHECK(std::abs(s.surface_side.value - s.volume_side.value) <= 1e-6);
  }
  const CoareaSides plane = coarea_shell_check(gamma_log2d(), make_vec({0.1, 0.2}), 0.6, fields::product(2, 0, 1), q);
  CHECK(std::abs(plane.surface_side.value - plane.volume_side.value) <= 1e-4 * std::abs(plane.volume_side.value));

  QuadratureSpec mc;
  mc.mc_samples = 1000000;
  mc.seed = 71;
  const CoareaSides hh = coarea_shell_check(gamma_folland(StratifiedGroup::heisenberg()), x0, 1.0,
                                            ScalarField::constant(3, 1.0), mc);
  CHECK(hh.surface_side.value == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(std::abs(hh.surface_side.value - hh.volume_side.value) <= 1e-3 * hh.surface_side.value);
}

TEST_CASE("geometry rejections") {
  CHECK_THROWS_AS(LevelSetRegion(gamma_log2d(), Vec::Zero(2), 1.0), Error);
  try {
    LevelSetRegion(gamma_log2d(), Vec::Zero(2), 1.5);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Geometry);
    CHECK(std::string(e.what()).find("reduce r") != std::string::npos);
  }
  CHECK_THROWS_AS(LevelSetRegion(gamma_laplace(3), Vec::Zero(2), 1.0), Error);
}

}  // TEST_SUITE
