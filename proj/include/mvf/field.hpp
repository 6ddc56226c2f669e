#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "mvf/linalg.hpp"

namespace mvf {

struct Ball {
  Vec center;
  double radius = 0.0;
};

// A scalar field on R^N with optional analytic first and second derivatives.
// Evaluation is pure; a field may be shared freely between threads.
class ScalarField {
 public:
  using ValueFn = std::function<double(const Vec&)>;
  using GradientFn = std::function<Vec(const Vec&)>;
  using HessianFn = std::function<Mat(const Vec&)>;

  ScalarField() = default;
  ScalarField(int dim, ValueFn value, GradientFn gradient = {}, HessianFn hessian = {});

  int dim() const { return dim_; }
  bool has_gradient() const { return static_cast<bool>(gradient_); }
  bool has_hessian() const { return static_cast<bool>(hessian_); }

  // Throw FieldEvaluation on non-finite output or a dimension mismatch, and
  // InsufficientSmoothness when the requested derivative was not supplied.
  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;
  double operator()(const Vec& x) const { return value(x); }

  // Analytic gradient when present, central differences otherwise.
  Vec gradient_or_fd(const Vec& x) const;

  const std::optional<Ball>& support() const { return support_; }
  ScalarField& with_support(Ball b);

  // Marks a field known to vanish identically; quadratures may skip it.
  bool is_zero() const { return zero_; }

  const std::string& label() const { return label_; }
  ScalarField& with_label(std::string s);

  static ScalarField constant(int dim, double c);
  static ScalarField zero(int dim);

 private:
  int dim_ = 0;
  ValueFn value_;
  GradientFn gradient_;
  HessianFn hessian_;
  std::optional<Ball> support_;
  bool zero_ = false;
  std::string label_;
};

ScalarField linear_combination(double alpha, const ScalarField& u, double beta, const ScalarField& w);

// Central-difference step used whenever an analytic derivative is missing.
double fd_step(const Vec& x);
Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x);
Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& x);

// max_k |fd_k - analytic_k| / (1 + |analytic_k|) over the gradient entries.
double gradient_fd_error(const ScalarField& u, const Vec& x);
double hessian_asymmetry(const ScalarField& u, const Vec& x);

// A field of square matrices over R^N (N x N for the Euclidean operator,
// m x m over a Carnot group). Partial derivatives of the entries are optional
// and fall back to finite differences where a consumer needs them.
class MatrixField {
 public:
  using ValueFn = std::function<Mat(const Vec&)>;
  using PartialFn = std::function<Mat(const Vec&, int)>;
  using SecondPartialFn = std::function<Mat(const Vec&, int, int)>;

  MatrixField() = default;
  MatrixField(int ambient_dim, int size, ValueFn value, PartialFn partial = {},
              SecondPartialFn second_partial = {});

  static MatrixField constant(const Mat& a, int ambient_dim);
  // a(x) * base; partials follow from the gradient and Hessian of a.
  static MatrixField scaled(const ScalarField& a, const Mat& base);

  int ambient_dim() const { return ambient_dim_; }
  int size() const { return size_; }
  bool is_constant() const { return constant_; }
  bool has_partials() const { return static_cast<bool>(partial_); }

  Mat value(const Vec& x) const;
  Mat partial(const Vec& x, int k) const;
  Mat second_partial(const Vec& x, int k, int l) const;
  // Row divergences (sum_j d_j a_ij)_i; requires size == ambient_dim.
  Vec divergence_rows(const Vec& x) const;

 private:
  int ambient_dim_ = 0;
  int size_ = 0;
  bool constant_ = false;
  ValueFn value_;
  PartialFn partial_;
  SecondPartialFn second_partial_;
};

// Catalog of analytic test fields.
namespace fields {

ScalarField coordinate(int dim, int i);
// 0.5 x^T Q x + <g, x> + c
ScalarField quadratic(const Mat& q, const Vec& g, double c);
ScalarField harmonic_quadratic(int dim);  // x1^2 - x2^2
ScalarField product(int dim, int i, int j);  // x_i x_j
ScalarField squared_norm(int dim);
// scale * exp(<a, x>)
ScalarField exponential(const Vec& a, double scale = 1.0);
// exp(-1 / (1 - |x - c|^2 / R^2)) inside the ball, 0 outside.
ScalarField bump(const Vec& center, double radius);

}  // namespace fields

}  // namespace mvf
