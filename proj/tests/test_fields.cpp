#include <doctest.h>

#include <cmath>

#include "mvf/elliptic.hpp"
#include "mvf/error.hpp"
#include "samples.hpp"

using namespace mvf;

TEST_SUITE("fields_and_operators") {

TEST_CASE("laplacian of catalog polynomials") {
  const EllipticOperator lap = operators::laplacian(3);
  CHECK(apply_operator(lap, fields::squared_norm(3), make_vec({0.3, -1.2, 2.0})) == doctest::Approx(6.0));
  CHECK(std::abs(apply_operator(lap, fields::harmonic_quadratic(3), make_vec({1, 2, 3}))) < 1e-12);
  Mat a = Vec(make_vec({2, 1, 1})).asDiagonal();
  const EllipticOperator op = operators::constant_coefficient(a);
  for (const Vec& x : box_samples(20, 3, 4)) {
    CHECK(apply_operator(op, fields::product(3, 0, 0), x) == doctest::Approx(4.0));
  }
}

TEST_CASE("adjoint of the drift operator") {
  const EllipticOperator op = operators::drift(make_vec({1, 0, 0}));
  const ScalarField v = fields::exponential(make_vec({-1, 0, 0}));
  for (const Vec& x : box_samples(20, 3, 5)) {
    CHECK(apply_adjoint(op, v, x) == doctest::Approx(2.0 * std::exp(-x(0))).epsilon(1e-12));
  }
}

TEST_CASE("b = 0 makes the operator self-adjoint pointwise") {
  Mat a(3, 3);
  a << 3, 0.5, 0, 0.5, 2, 0.1, 0, 0.1, 1;
  const EllipticOperator op = operators::constant_coefficient(a);
  const ScalarField u = fields::exponential(make_vec({0.3, -0.2, 0.5}), 2.0);
  for (const Vec& x : box_samples(50, 3, 6)) {
    CHECK(apply_adjoint(op, u, x) == doctest::Approx(apply_operator(op, u, x)).epsilon(1e-13));
  }
}

TEST_CASE("adjoint of the adjoint is the operator") {
  const ScalarField a = fields::exponential(make_vec({0.2, 0.1, -0.3}));
  std::vector<ScalarField> b{fields::coordinate(3, 1), ScalarField::constant(3, 0.5), fields::product(3, 0, 2)};
  const EllipticOperator op(MatrixField::scaled(a, Mat::Identity(3, 3)), b, fields::coordinate(3, 0), 0.1, 10.0);
  const EllipticOperator twice = op.adjoint().adjoint();
  const ScalarField u = fields::quadratic(Mat::Identity(3, 3) * 2.0, make_vec({1, -1, 0.5}), 0.3);
  for (const Vec& x : box_samples(40, 3, 7, -0.5, 0.5)) {
    CHECK(std::abs(apply_operator(twice, u, x) - apply_operator(op, u, x)) < 1e-10);
  }
}

TEST_CASE("linearity in u") {
  const EllipticOperator op = operators::drift(make_vec({0.5, -1, 2}));
  const ScalarField u = fields::product(3, 0, 1);
  const ScalarField w = fields::squared_norm(3);
  const ScalarField mix = linear_combination(2.5, u, -0.75, w);
  for (const Vec& x : box_samples(100, 3, 8)) {
    const double lhs = apply_operator(op, mix, x);
    const double rhs = 2.5 * apply_operator(op, u, x) - 0.75 * apply_operator(op, w, x);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("catalog gradients against finite differences") {
  const std::vector<ScalarField> catalog{
      fields::coordinate(3, 2),        fields::harmonic_quadratic(3),
      fields::product(3, 0, 1),        fields::squared_norm(3),
      fields::exponential(make_vec({0.4, -0.3, 0.2}), 1.5),
      fields::bump(make_vec({0.1, 0, 0}), 2.0),
  };
  const auto pts = box_samples(100, 3, 9, 0.0, 1.0);
  for (const ScalarField& u : catalog) {
    for (const Vec& x : pts) {
      CHECK(gradient_fd_error(u, x) <= 1e-6);
      CHECK(hessian_asymmetry(u, x) <= 1e-12);
    }
  }
}

TEST_CASE("field evaluation errors") {
  const ScalarField u(2, [](const Vec& x) { return std::log(x(0)); });
  CHECK_THROWS_AS(u.value(make_vec({-1.0, 0.0})), Error);
  CHECK_THROWS_AS(u.value(make_vec({1.0, 0.0, 0.0})), Error);
  try {
    u.hessian(make_vec({1.0, 0.0}));
    FAIL("expected a smoothness error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientSmoothness);
  }
  CHECK(u.gradient_or_fd(make_vec({2.0, 0.0}))(0) == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("ellipticity is enforced") {
  Mat bad(2, 2);
  bad << 1, 0, 0, -1;
  CHECK_THROWS_AS(operators::constant_coefficient(bad), Error);
  Mat skew(2, 2);
  skew << 1, 0.5, 0, 1;
  CHECK_THROWS_AS(operators::constant_coefficient(skew), Error);

  const ScalarField a = fields::quadratic(2.0 * Mat::Identity(2, 2), Vec::Zero(2), 1.0);  // 1 + |x|^2
  const EllipticOperator op(MatrixField::scaled(a, Mat::Identity(2, 2)), std::vector<ScalarField>(2, ScalarField::zero(2)),
                          ScalarField::zero(2), 1.0, 2.0);
  const auto inside = box_samples(100, 2, 10, -0.7, 0.7);
  CHECK_NOTHROW(op.check_ellipticity(inside));
  const std::vector<Vec> outside{make_vec({1.0, 1.0})};
  CHECK_THROWS_AS(op.check_ellipticity(outside), Error);
}

TEST_CASE("duality witness") {
  const Box box{Vec::Constant(3, -1.5), Vec::Constant(3, 1.5)};
  const ScalarField u = fields::bump(make_vec({0.2, 0.0, -0.1}), 0.9);
  const ScalarField v = fields::bump(make_vec({-0.3, 0.1, 0.2}), 1.0);

  SUBCASE("symmetric pair") {
    const DualityResult r = adjoint_duality_check(operators::laplacian(3), u, u, box, 24);
    CHECK(r.gap < 1e-12);
  }
  SUBCASE("v = 0") {
    const DualityResult r = adjoint_duality_check(operators::drift(make_vec({1, 0, 0})), u, ScalarField::zero(3), box, 8);
    CHECK(r.gap == 0.0);
  }
  SUBCASE("drift, distinct bumps") {
    const DualityResult r = adjoint_duality_check(operators::drift(make_vec({1, 0, 0})), u, v, box, 64);
    CHECK(r.gap <= 1e-6);
    CHECK(r.gap <= 5.0 * r.error_estimate + 1e-14);
  }
  SUBCASE("every catalog operator") {
    Mat a = Vec(make_vec({4, 1, 1})).asDiagonal();
    for (const EllipticOperator& op : {operators::laplacian(3), operators::constant_coefficient(a),
                                       operators::yukawa(1.0), operators::drift(make_vec({0.5, -1, 0.25}))}) {
      const DualityResult r = adjoint_duality_check(op, u, v, box, 48);
      CHECK(r.gap <= 5.0 * r.error_estimate + 1e-12);
    }
  }
}

}  // TEST_SUITE
