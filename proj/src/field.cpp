#include "mvf/field.hpp"

#include <cmath>
#include <utility>

#include "mvf/error.hpp"

namespace mvf {

namespace {

void require_dim(int expected, const Vec& x, const char* what) {
  if (x.size() != expected) {
    throw Error(ErrorKind::FieldEvaluation, std::string(what) + ": point has dimension " +
                                                std::to_string(x.size()) + ", field expects " +
                                                std::to_string(expected));
  }
}

}  // namespace

ScalarField::ScalarField(int dim, ValueFn value, GradientFn gradient, HessianFn hessian)
    : dim_(dim), value_(std::move(value)), gradient_(std::move(gradient)), hessian_(std::move(hessian)) {
  if (dim < 1 || dim > kMaxDim) {
    throw Error(ErrorKind::InvalidArgument, "scalar field dimension out of range");
  }
  if (!value_) throw Error(ErrorKind::InvalidArgument, "scalar field needs a value map");
}

double ScalarField::value(const Vec& x) const {
  require_dim(dim_, x, "value");
  const double v = value_(x);
  if (!std::isfinite(v)) throw Error(ErrorKind::FieldEvaluation, "non-finite value");
  return v;
}

Vec ScalarField::gradient(const Vec& x) const {
  if (!gradient_) throw Error(ErrorKind::InsufficientSmoothness, "field has no analytic gradient");
  require_dim(dim_, x, "gradient");
  Vec g = gradient_(x);
  if (!g.allFinite()) throw Error(ErrorKind::FieldEvaluation, "non-finite gradient");
  return g;
}

Mat ScalarField::hessian(const Vec& x) const {
  if (!hessian_) throw Error(ErrorKind::InsufficientSmoothness, "field has no analytic hessian");
  require_dim(dim_, x, "hessian");
  Mat h = hessian_(x);
  if (!h.allFinite()) throw Error(ErrorKind::FieldEvaluation, "non-finite hessian");
  return h;
}

Vec ScalarField::gradient_or_fd(const Vec& x) const {
  if (gradient_) return gradient(x);
  return fd_gradient([this](const Vec& p) { return value(p); }, x);
}

ScalarField& ScalarField::with_support(Ball b) {
  support_ = std::move(b);
  return *this;
}

ScalarField& ScalarField::with_label(std::string s) {
  label_ = std::move(s);
  return *this;
}

ScalarField ScalarField::constant(int dim, double c) {
  ScalarField f(
      dim, [c](const Vec&) { return c; }, [dim](const Vec&) { return Vec(Vec::Zero(dim)); },
      [dim](const Vec&) { return Mat(Mat::Zero(dim, dim)); });
  f.zero_ = (c == 0.0);
  f.label_ = c == 1.0 ? "one" : "const";
  return f;
}

ScalarField ScalarField::zero(int dim) {
  ScalarField f = constant(dim, 0.0);
  f.label_ = "zero";
  // The empty ball: nothing to integrate.
  f.support_ = Ball{Vec::Zero(dim), 0.0};
  return f;
}

ScalarField linear_combination(double alpha, const ScalarField& u, double beta, const ScalarField& w) {
  if (u.dim() != w.dim()) throw Error(ErrorKind::InvalidArgument, "linear combination of fields of different dimension");
  ScalarField::GradientFn grad;
  ScalarField::HessianFn hess;
  if (u.has_gradient() && w.has_gradient()) {
    grad = [=](const Vec& x) { return Vec(alpha * u.gradient(x) + beta * w.gradient(x)); };
  }
  if (u.has_hessian() && w.has_hessian()) {
    hess = [=](const Vec& x) { return Mat(alpha * u.hessian(x) + beta * w.hessian(x)); };
  }
  return ScalarField(
      u.dim(), [=](const Vec& x) { return alpha * u.value(x) + beta * w.value(x); }, grad, hess);
}

double fd_step(const Vec& x) { return 1e-5 * (1.0 + x.norm()); }

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x) {
  const double h = fd_step(x);
  Vec g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Vec xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    g(k) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& x) {
  // Second differences need a wider step than first differences to keep the
  // cancellation error near 1e-8.
  const double h = 1e-4 * (1.0 + x.norm());
  const Eigen::Index n = x.size();
  Mat hm(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      auto shifted = [&](double si, double sj) {
        Vec p = x;
        p(i) += si * h;
        p(j) += sj * h;
        return f(p);
      };
      const double v = (shifted(1, 1) - shifted(1, -1) - shifted(-1, 1) + shifted(-1, -1)) / (4.0 * h * h);
      hm(i, j) = v;
      hm(j, i) = v;
    }
  }
  return hm;
}

double gradient_fd_error(const ScalarField& u, const Vec& x) {
  const Vec analytic = u.gradient(x);
  const Vec numeric = fd_gradient([&u](const Vec& p) { return u.value(p); }, x);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    worst = std::max(worst, std::abs(numeric(k) - analytic(k)) / (1.0 + std::abs(analytic(k))));
  }
  return worst;
}

double hessian_asymmetry(const ScalarField& u, const Vec& x) {
  const Mat h = u.hessian(x);
  return (h - h.transpose()).cwiseAbs().maxCoeff();
}

MatrixField::MatrixField(int ambient_dim, int size, ValueFn value, PartialFn partial,
                         SecondPartialFn second_partial)
    : ambient_dim_(ambient_dim),
      size_(size),
      value_(std::move(value)),
      partial_(std::move(partial)),
      second_partial_(std::move(second_partial)) {
  if (ambient_dim < 1 || ambient_dim > kMaxDim || size < 1 || size > ambient_dim) {
    throw Error(ErrorKind::InvalidArgument, "matrix field dimensions out of range");
  }
  if (!value_) throw Error(ErrorKind::InvalidArgument, "matrix field needs a value map");
}

MatrixField MatrixField::constant(const Mat& a, int ambient_dim) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::InvalidArgument, "matrix must be square");
  const Eigen::Index m = a.rows();
  MatrixField f(
      ambient_dim, static_cast<int>(m), [a](const Vec&) { return a; },
      [m](const Vec&, int) { return Mat(Mat::Zero(m, m)); },
      [m](const Vec&, int, int) { return Mat(Mat::Zero(m, m)); });
  f.constant_ = true;
  return f;
}

MatrixField MatrixField::scaled(const ScalarField& a, const Mat& base) {
  if (!a.has_gradient() || !a.has_hessian()) {
    throw Error(ErrorKind::InsufficientSmoothness, "scaled matrix field needs an analytic scalar factor");
  }
  return MatrixField(
      a.dim(), static_cast<int>(base.rows()), [a, base](const Vec& x) { return Mat(a.value(x) * base); },
      [a, base](const Vec& x, int k) { return Mat(a.gradient(x)(k) * base); },
      [a, base](const Vec& x, int k, int l) { return Mat(a.hessian(x)(k, l) * base); });
}

Mat MatrixField::value(const Vec& x) const {
  require_dim(ambient_dim_, x, "matrix value");
  Mat v = value_(x);
  if (!v.allFinite()) throw Error(ErrorKind::FieldEvaluation, "non-finite matrix coefficient");
  return v;
}

Mat MatrixField::partial(const Vec& x, int k) const {
  if (partial_) return partial_(x, k);
  const double h = fd_step(x);
  Vec xp = x, xm = x;
  xp(k) += h;
  xm(k) -= h;
  return (value(xp) - value(xm)) / (2.0 * h);
}

Mat MatrixField::second_partial(const Vec& x, int k, int l) const {
  if (second_partial_) return second_partial_(x, k, l);
  if (!partial_) {
    throw Error(ErrorKind::InsufficientSmoothness, "matrix field has no analytic derivatives");
  }
  const double h = fd_step(x);
  Vec xp = x, xm = x;
  xp(l) += h;
  xm(l) -= h;
  return (partial_(xp, k) - partial_(xm, k)) / (2.0 * h);
}

Vec MatrixField::divergence_rows(const Vec& x) const {
  if (size_ != ambient_dim_) {
    throw Error(ErrorKind::InvalidArgument, "row divergence needs an N x N matrix field");
  }
  Vec d = Vec::Zero(size_);
  for (int j = 0; j < size_; ++j) d += partial(x, j).col(j);
  return d;
}

namespace fields {

ScalarField coordinate(int dim, int i) {
  Vec g = Vec::Zero(dim);
  g(i) = 1.0;
  return quadratic(Mat::Zero(dim, dim), g, 0.0).with_label("x" + std::to_string(i + 1));
}

ScalarField quadratic(const Mat& q, const Vec& g, double c) {
  const int dim = static_cast<int>(g.size());
  const Mat qs = 0.5 * (q + q.transpose());
  return ScalarField(
      dim, [qs, g, c](const Vec& x) { return 0.5 * x.dot(qs * x) + g.dot(x) + c; },
      [qs, g](const Vec& x) { return Vec(qs * x + g); }, [qs](const Vec&) { return qs; });
}

ScalarField harmonic_quadratic(int dim) {
  Mat q = Mat::Zero(dim, dim);
  q(0, 0) = 2.0;
  q(1, 1) = -2.0;
  return quadratic(q, Vec::Zero(dim), 0.0).with_label("x1^2-x2^2");
}

ScalarField product(int dim, int i, int j) {
  Mat q = Mat::Zero(dim, dim);
  q(i, j) += 1.0;
  q(j, i) += 1.0;
  return quadratic(q, Vec::Zero(dim), 0.0)
      .with_label("x" + std::to_string(i + 1) + "x" + std::to_string(j + 1));
}

ScalarField squared_norm(int dim) {
  return quadratic(2.0 * Mat::Identity(dim, dim), Vec::Zero(dim), 0.0).with_label("|x|^2");
}

ScalarField exponential(const Vec& a, double scale) {
  const int dim = static_cast<int>(a.size());
  return ScalarField(
      dim, [a, scale](const Vec& x) { return scale * std::exp(a.dot(x)); },
      [a, scale](const Vec& x) { return Vec(scale * std::exp(a.dot(x)) * a); },
      [a, scale](const Vec& x) { return Mat(scale * std::exp(a.dot(x)) * a * a.transpose()); });
}

ScalarField bump(const Vec& center, double radius) {
  const int dim = static_cast<int>(center.size());
  const double r2 = radius * radius;
  // g(q) = exp(-1/(1-q)), q = |x-c|^2/R^2
  auto profile = [](double q, double& g, double& dg, double& d2g) {
    if (q >= 1.0) {
      g = dg = d2g = 0.0;
      return;
    }
    const double s = 1.0 - q;
    g = std::exp(-1.0 / s);
    dg = -g / (s * s);
    d2g = g * (2.0 * q - 1.0) / (s * s * s * s);
  };
  ScalarField f(
      dim,
      [=](const Vec& x) {
        double g, dg, d2g;
        profile((x - center).squaredNorm() / r2, g, dg, d2g);
        return g;
      },
      [=](const Vec& x) {
        double g, dg, d2g;
        const Vec d = x - center;
        profile(d.squaredNorm() / r2, g, dg, d2g);
        return Vec(dg * 2.0 * d / r2);
      },
      [=](const Vec& x) {
        double g, dg, d2g;
        const Vec d = x - center;
        profile(d.squaredNorm() / r2, g, dg, d2g);
        const Vec dq = 2.0 * d / r2;
        return Mat(d2g * dq * dq.transpose() + dg * (2.0 / r2) * Mat::Identity(dim, dim));
      });
  f.with_support(Ball{center, radius});
  f.with_label("bump");
  return f;
}

}  // namespace fields

}  // namespace mvf
