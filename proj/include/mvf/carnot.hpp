#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mvf/field.hpp"

namespace mvf {

// A stratified group identified with R^N through exponential coordinates.
// Coordinates are ordered by layer; the first m = n_1 carry the horizontal
// generators X_1..X_m, given by their coefficient matrix Phi(x) (N x m,
// column j holds phi^j_k).
//
// Catalog instances:
//   abelian(N):   R^N, X_j = d/dx_j, one layer, Q = N.
//   heisenberg(): H^1 with coordinates (x, y, t),
//                 (x,y,t) o (x',y',t') = (x+x', y+y', t+t' + 2(x y' - x' y)),
//                 X_1 = d_x - 2y d_t, X_2 = d_y + 2x d_t, [X_1, X_2] = 4 d_t,
//                 delta_l(x,y,t) = (l x, l y, l^2 t), Q = 4.
class StratifiedGroup {
 public:
  static StratifiedGroup abelian(int n);
  static StratifiedGroup heisenberg();

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  int horizontal_dim() const { return layers_.front(); }
  int step() const { return static_cast<int>(layers_.size()); }
  const std::vector<int>& layer_dims() const { return layers_; }
  int homogeneous_dim() const;
  int layer_of(int coordinate) const;  // 1-based layer index
  bool is_abelian() const { return layers_.size() == 1; }

  Vec compose(const Vec& x, const Vec& y) const { return law_(x, y); }
  Vec inverse(const Vec& x) const { return inverse_(x); }
  Vec dilate(double lambda, const Vec& x) const;
  Mat dilation_matrix(double lambda) const;

  Mat fields(const Vec& x) const { return fields_(x); }
  Mat field_partial(const Vec& x, int k) const { return field_partial_(x, k); }
  // Jacobian of x -> y o x (constant in x for the catalog groups).
  Mat left_translation_jacobian(const Vec& y) const { return left_jacobian_(y); }

  // Integral curve of X_j through x at time s: x o (s e_j).
  Vec flow(int j, const Vec& x, double s) const;

  // Rank of span{X_i(x), [X_i, X_j](x)}; brackets of length two suffice for step <= 2.
  int hormander_rank(const Vec& x) const;

 private:
  std::string name_;
  int dim_ = 0;
  std::vector<int> layers_;
  std::function<Vec(const Vec&, const Vec&)> law_;
  std::function<Vec(const Vec&)> inverse_;
  std::function<Mat(const Vec&)> fields_;
  std::function<Mat(const Vec&, int)> field_partial_;
  std::function<Mat(const Vec&)> left_jacobian_;
};

// ||x||_inf = max_j eps_j |x_(j)|^{1/j}, x_(j) the layer-j block.
class HomogeneousNorm {
 public:
  HomogeneousNorm(StratifiedGroup group, std::vector<double> weights);
  static HomogeneousNorm unit_weights(const StratifiedGroup& group);

  const StratifiedGroup& group() const { return group_; }
  const std::vector<double>& weights() const { return weights_; }
  double value(const Vec& x) const;
  // d(x, y) = ||y^{-1} o x||
  double distance(const Vec& x, const Vec& y) const;

 private:
  StratifiedGroup group_;
  std::vector<double> weights_;
};

// Horizontal calculus. Lie derivatives are taken along X_j with the analytic
// gradient (and Hessian for second derivatives) of the field.
double lie_derivative(const StratifiedGroup& g, int j, const ScalarField& u, const Vec& x);
Vec horizontal_gradient(const StratifiedGroup& g, const ScalarField& u, const Vec& x);
// Horizontal projection of a Euclidean gradient: Phi(x)^T grad.
Vec horizontal_part(const StratifiedGroup& g, const Vec& x, const Vec& euclidean_gradient);
double horizontal_divergence(const StratifiedGroup& g, std::span<const ScalarField> f, const Vec& x);
// Matrix (X_i X_j u)(x), i, j < m.
Mat horizontal_hessian(const StratifiedGroup& g, const ScalarField& u, const Vec& x);

// u o L_y and u o delta_lambda with propagated derivatives.
ScalarField left_translate(const StratifiedGroup& g, const ScalarField& u, const Vec& y);
ScalarField dilate_field(const StratifiedGroup& g, const ScalarField& u, double lambda);

// ((x^2 + y^2)^2 + t^2)^{1/4} on H^1, the gauge whose -2 power is Delta_H-harmonic
// for the fields above.
ScalarField koranyi_gauge();

// L_G u = sum a_ij X_i X_j u + 2 sum (X_j a_ij)(X_i u) + (sum X_i X_j a_ij) u,
// L_G* = sum a_ij X_i X_j.
class SubellipticOperator {
 public:
  SubellipticOperator(StratifiedGroup group, MatrixField a, double lambda, double Lambda);
  static SubellipticOperator sublaplacian(const StratifiedGroup& group);

  const StratifiedGroup& group() const { return group_; }
  const MatrixField& A() const { return a_; }
  double lambda() const { return lambda_; }
  double Lambda() const { return Lambda_; }

  Vec b(const Vec& x) const;  // b_i = sum_j X_j a_ij
  double c(const Vec& x) const;  // sum_ij X_i X_j a_ij
  void check_ellipticity(std::span<const Vec> samples) const;

 private:
  StratifiedGroup group_;
  MatrixField a_;
  double lambda_;
  double Lambda_;
};

double apply_subelliptic(const SubellipticOperator& op, const ScalarField& u, const Vec& x);
double apply_subelliptic_adjoint(const SubellipticOperator& op, const ScalarField& u, const Vec& x);

struct WeightsFit {
  std::vector<double> weights;  // per layer, weights[0] == 1
  double max_violation = 0.0;   // max of d(x,z) - d(x,y) - d(y,z) over the sample
  std::size_t violations = 0;
  std::size_t samples = 0;
};

// Largest common eps (layers >= 2, searched on a descending grid) with no
// triangle-inequality violation on `samples` random triples in the unit box.
WeightsFit d_infty_weights_fit(const StratifiedGroup& g, std::size_t samples, std::uint64_t seed);

// Triangle-inequality audit of a given norm.
WeightsFit triangle_audit(const HomogeneousNorm& norm, std::size_t samples, std::uint64_t seed);

struct SphericalFactor {
  double value = 0.0;
  double error = 0.0;  // change against the half-resolution slice grid
  Vec maximizer;
};

// max over z in B(0,1) of the Euclidean (N-1)-measure of B(z,1) cut by the
// hyperplane nu^perp + V_2 + ... + V_step, nu a horizontal direction.
SphericalFactor spherical_factor_estimate(const HomogeneousNorm& norm, const Vec& horizontal_direction,
                                          std::size_t candidates, std::uint64_t seed, int grid = 256);

struct MetricEquivalence {
  double c_minus = 0.0;  // d >= c_minus |x - y|
  double c_plus = 0.0;   // d <= c_plus |x - y|^{1/step}
};

MetricEquivalence fit_metric_equivalence(const HomogeneousNorm& norm, std::size_t samples, std::uint64_t seed);

}  // namespace mvf
