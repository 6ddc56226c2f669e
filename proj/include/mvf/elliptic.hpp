#pragma once

#include <span>
#include <vector>

#include "mvf/field.hpp"

namespace mvf {

// L u = div(A grad u) + <b, grad u> + c u on R^N, with lambda |xi|^2 <= <A xi, xi> <= Lambda |xi|^2.
// The Hoelder exponent is carried as metadata only.
class EllipticOperator {
 public:
  EllipticOperator(MatrixField a, std::vector<ScalarField> b, ScalarField c, double lambda, double Lambda,
                   double alpha = 1.0);

  int dim() const { return a_.ambient_dim(); }
  const MatrixField& A() const { return a_; }
  const std::vector<ScalarField>& b() const { return b_; }
  const ScalarField& c() const { return c_; }
  double lambda() const { return lambda_; }
  double Lambda() const { return Lambda_; }
  double alpha() const { return alpha_; }

  bool has_drift() const;
  bool has_zero_order() const { return !c_.is_zero(); }
  double divergence_b(const Vec& x) const;

  // L* = div(A grad) - <b, grad> + (c - div b), as an operator of the same form.
  EllipticOperator adjoint() const;

  // Throws InvalidArgument when A(x) is not symmetric or leaves [lambda, Lambda].
  void check_ellipticity(std::span<const Vec> samples) const;

 private:
  MatrixField a_;
  std::vector<ScalarField> b_;
  ScalarField c_;
  double lambda_;
  double Lambda_;
  double alpha_;
};

// div(A grad u) + <b, grad u> + c u, expanded as <A, Hess u> + <divrows(A) + b, grad u> + c u.
double apply_operator(const EllipticOperator& op, const ScalarField& u, const Vec& x);
// div(A grad v) - <b, grad v> + (c - div b) v.
double apply_adjoint(const EllipticOperator& op, const ScalarField& v, const Vec& x);

struct Box {
  Vec lower;
  Vec upper;
};

struct DualityResult {
  double gap = 0.0;             // |int (Lu) v - int u (L* v)|
  double error_estimate = 0.0;  // change against the half-order grid
};

// Tensor Gauss-Legendre witness of int (Lu) v = int u (L* v) for compactly
// supported u, v. Supports must lie strictly inside the box.
DualityResult adjoint_duality_check(const EllipticOperator& op, const ScalarField& u, const ScalarField& v,
                                    const Box& box, int order_per_axis);

namespace operators {

EllipticOperator laplacian(int dim);
EllipticOperator constant_coefficient(const Mat& a);
// Delta - k^2 on R^3.
EllipticOperator yukawa(double k);
// Delta + <b, grad> on R^3, b constant.
EllipticOperator drift(const Vec& b);

}  // namespace operators

}  // namespace mvf
