#include "mvf/elliptic.hpp"

#include <cmath>
#include <utility>

#include "mvf/error.hpp"
#include "mvf/quadrature.hpp"

namespace mvf {

EllipticOperator::EllipticOperator(MatrixField a, std::vector<ScalarField> b, ScalarField c, double lambda,
                                   double Lambda, double alpha)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), lambda_(lambda), Lambda_(Lambda), alpha_(alpha) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::InvalidArgument, "ellipticity constant lambda must be positive");
  if (!(lambda < Lambda)) throw Error(ErrorKind::InvalidArgument, "need lambda < Lambda");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorKind::InvalidArgument, "Hoelder exponent must lie in (0,1]");
  if (a_.size() != a_.ambient_dim()) throw Error(ErrorKind::InvalidArgument, "A must be N x N");
  if (static_cast<int>(b_.size()) != dim()) throw Error(ErrorKind::InvalidArgument, "drift needs N components");
  for (const auto& bi : b_) {
    if (bi.dim() != dim()) throw Error(ErrorKind::InvalidArgument, "drift component has wrong dimension");
  }
  if (c_.dim() != dim()) throw Error(ErrorKind::InvalidArgument, "zero-order coefficient has wrong dimension");
}

bool EllipticOperator::has_drift() const {
  for (const auto& bi : b_) {
    if (!bi.is_zero()) return true;
  }
  return false;
}

double EllipticOperator::divergence_b(const Vec& x) const {
  double d = 0.0;
  for (int i = 0; i < dim(); ++i) {
    if (b_[i].is_zero()) continue;
    d += b_[i].gradient_or_fd(x)(i);
  }
  return d;
}

EllipticOperator EllipticOperator::adjoint() const {
  std::vector<ScalarField> nb;
  nb.reserve(b_.size());
  for (const auto& bi : b_) {
    if (bi.is_zero()) {
      nb.push_back(bi);
      continue;
    }
    ScalarField::GradientFn g;
    ScalarField::HessianFn h;
    if (bi.has_gradient()) g = [bi](const Vec& x) { return Vec(-bi.gradient(x)); };
    if (bi.has_hessian()) h = [bi](const Vec& x) { return Mat(-bi.hessian(x)); };
    nb.emplace_back(dim(), [bi](const Vec& x) { return -bi.value(x); }, g, h);
  }
  ScalarField nc = c_;
  if (has_drift()) {
    const EllipticOperator self = *this;
    nc = ScalarField(dim(), [self](const Vec& x) { return self.c().value(x) - self.divergence_b(x); });
  }
  return EllipticOperator(a_, std::move(nb), std::move(nc), lambda_, Lambda_, alpha_);
}

void EllipticOperator::check_ellipticity(std::span<const Vec> samples) const {
  for (const Vec& x : samples) {
    const Mat a = a_.value(x);
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + a.cwiseAbs().maxCoeff())) {
      throw Error(ErrorKind::InvalidArgument, "A(x) is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo < lambda_ * (1.0 - 1e-12) || hi > Lambda_ * (1.0 + 1e-12)) {
      throw Error(ErrorKind::InvalidArgument, "eigenvalues of A(x) leave [lambda, Lambda]");
    }
  }
}

namespace {

double principal_and_first_order(const EllipticOperator& op, const ScalarField& u, const Vec& x, double drift_sign) {
  const Mat a = op.A().value(x);
  const Mat hess = u.hessian(x);
  const Vec grad = u.gradient(x);
  Vec first = op.A().is_constant() ? Vec(Vec::Zero(op.dim())) : op.A().divergence_rows(x);
  for (int i = 0; i < op.dim(); ++i) {
    if (!op.b()[i].is_zero()) first(i) += drift_sign * op.b()[i].value(x);
  }
  return (a.cwiseProduct(hess)).sum() + first.dot(grad);
}

void require_finite(double v) {
  if (!std::isfinite(v)) throw Error(ErrorKind::FieldEvaluation, "operator application produced a non-finite value");
}

}  // namespace

double apply_operator(const EllipticOperator& op, const ScalarField& u, const Vec& x) {
  double v = principal_and_first_order(op, u, x, +1.0);
  if (op.has_zero_order()) v += op.c().value(x) * u.value(x);
  require_finite(v);
  return v;
}

double apply_adjoint(const EllipticOperator& op, const ScalarField& v, const Vec& x) {
  double r = principal_and_first_order(op, v, x, -1.0);
  double zero_order = op.has_zero_order() ? op.c().value(x) : 0.0;
  if (op.has_drift()) zero_order -= op.divergence_b(x);
  if (zero_order != 0.0) r += zero_order * v.value(x);
  require_finite(r);
  return r;
}

namespace {

void require_support_inside(const ScalarField& f, const Box& box) {
  if (f.is_zero()) return;
  if (!f.support()) throw Error(ErrorKind::Support, "duality check needs compactly supported fields");
  const Ball& s = *f.support();
  for (Eigen::Index k = 0; k < s.center.size(); ++k) {
    if (s.center(k) - s.radius <= box.lower(k) || s.center(k) + s.radius >= box.upper(k)) {
      throw Error(ErrorKind::Support, "support touches the box boundary");
    }
  }
}

double tensor_integral(const EllipticOperator& op, const ScalarField& u, const ScalarField& v, const Box& box,
                       int order) {
  const int n = op.dim();
  std::vector<GaussRule> rules;
  for (int k = 0; k < n; ++k) rules.push_back(gauss_legendre(order, box.lower(k), box.upper(k)));
  CompensatedSum sum;
  std::vector<int> idx(n, 0);
  Vec x(n);
  while (true) {
    double w = 1.0;
    for (int k = 0; k < n; ++k) {
      x(k) = rules[k].nodes[idx[k]];
      w *= rules[k].weights[idx[k]];
    }
    sum.add(w * (apply_operator(op, u, x) * v.value(x) - u.value(x) * apply_adjoint(op, v, x)));
    int k = 0;
    while (k < n && ++idx[k] == order) idx[k++] = 0;
    if (k == n) break;
  }
  return sum.value();
}

}  // namespace

DualityResult adjoint_duality_check(const EllipticOperator& op, const ScalarField& u, const ScalarField& v,
                                    const Box& box, int order_per_axis) {
  if (order_per_axis < 2) throw Error(ErrorKind::InvalidArgument, "quadrature order must be at least 2");
  if (u.is_zero() || v.is_zero()) return {};
  require_support_inside(u, box);
  require_support_inside(v, box);
  // Both integrands vanish off supp u and supp v: integrate over the overlap only.
  Box inner = box;
  for (const ScalarField* f : {&u, &v}) {
    if (!f->support()) continue;
    const Ball& b = *f->support();
    inner.lower = inner.lower.cwiseMax((b.center.array() - b.radius).matrix());
    inner.upper = inner.upper.cwiseMin((b.center.array() + b.radius).matrix());
  }
  if ((inner.upper.array() <= inner.lower.array()).any()) return {};
  const double fine = tensor_integral(op, u, v, inner, order_per_axis);
  const double coarse = tensor_integral(op, u, v, inner, order_per_axis / 2);
  return {std::abs(fine), std::abs(fine - coarse)};
}

namespace operators {

namespace {

std::vector<ScalarField> zero_drift(int dim) {
  return std::vector<ScalarField>(dim, ScalarField::zero(dim));
}

}  // namespace

EllipticOperator laplacian(int dim) {
  return EllipticOperator(MatrixField::constant(Mat::Identity(dim, dim), dim), zero_drift(dim),
                          ScalarField::zero(dim), 0.5, 2.0);
}

EllipticOperator constant_coefficient(const Mat& a) {
  const int dim = static_cast<int>(a.rows());
  if (a.rows() != a.cols() || (a - a.transpose()).cwiseAbs().maxCoeff() > 1e-14) {
    throw Error(ErrorKind::InvalidArgument, "constant coefficient matrix must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  const double lo = es.eigenvalues().minCoeff();
  if (!(lo > 0.0)) throw Error(ErrorKind::InvalidArgument, "constant coefficient matrix must be positive definite");
  return EllipticOperator(MatrixField::constant(a, dim), zero_drift(dim), ScalarField::zero(dim), 0.5 * lo,
                          2.0 * es.eigenvalues().maxCoeff());
}

EllipticOperator yukawa(double k) {
  if (!(k > 0.0)) throw Error(ErrorKind::InvalidArgument, "yukawa parameter must be positive");
  return EllipticOperator(MatrixField::constant(Mat::Identity(3, 3), 3), zero_drift(3),
                          ScalarField::constant(3, -k * k), 0.5, 2.0);
}

EllipticOperator drift(const Vec& b) {
  if (b.size() != 3) throw Error(ErrorKind::InvalidArgument, "drift operator is defined on R^3");
  std::vector<ScalarField> bs;
  for (int i = 0; i < 3; ++i) bs.push_back(ScalarField::constant(3, b(i)));
  return EllipticOperator(MatrixField::constant(Mat::Identity(3, 3), 3), std::move(bs), ScalarField::zero(3), 0.5,
                          2.0);
}

}  // namespace operators

}  // namespace mvf
