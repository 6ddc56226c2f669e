#include "mvf/kernels.hpp"

#include <cmath>
#include <numbers>

#include "mvf/error.hpp"

namespace mvf {

namespace {

double ratio(const Mat& a, const Vec& grad, ZeroGradient conv) {
  const double n = grad.norm();
  if (n == 0.0) {
    if (conv == ZeroGradient::Throw) throw Error(ErrorKind::SingularKernel, "vanishing gradient in the surface kernel");
    return 0.0;
  }
  return grad.dot(a * grad) / n;
}

void require_euclidean(const GreenFunction& g, bool planar) {
  if (g.is_carnot()) throw Error(ErrorKind::Mismatch, "Euclidean kernel requested for " + g.name());
  if (planar != (g.dim() == 2)) {
    throw Error(ErrorKind::Mismatch, planar ? "planar kernel needs N = 2" : "this kernel needs N >= 3");
  }
}

}  // namespace

double kernel_K(const GreenFunction& g, const Vec& x0, const Vec& x, ZeroGradient conv) {
  if (g.is_carnot()) throw Error(ErrorKind::Mismatch, "Euclidean kernel requested for " + g.name());
  return ratio(g.A(), g.gradient(x, x0), conv);
}

double kernel_M(const GreenFunction& g, const Vec& x0, const Vec& x) {
  require_euclidean(g, false);
  const int n = g.dim();
  const Vec grad = g.gradient(x, x0);
  const double v = g.value(x, x0);
  if (!(v > 0.0)) throw Error(ErrorKind::SingularKernel, "volume kernel needs Gamma* > 0");
  return n / (n - 2.0) * grad.dot(g.A() * grad) / std::pow(v, 2.0 * (n - 1) / (n - 2));
}

double kernel_K2(const GreenFunction& g, const Vec& x0, const Vec& x, ZeroGradient conv) {
  require_euclidean(g, true);
  return ratio(g.A(), g.gradient(x, x0), conv);
}

double kernel_M2(const GreenFunction& g, const Vec& x0, const Vec& x) {
  require_euclidean(g, true);
  const Vec grad = g.gradient(x, x0);
  return 2.0 * grad.dot(g.A() * grad) / std::exp(2.0 * g.value(x, x0));
}

double kernel_KG(const GreenFunction& g, const Vec& x0, const Vec& x, ZeroGradient conv) {
  return ratio(g.A(), g.horizontal_gradient(x, x0), conv);
}

double kernel_MG(const GreenFunction& g, const Vec& x0, const Vec& x) {
  const int q = g.homogeneous_dim();
  if (q < 3) throw Error(ErrorKind::Mismatch, "horizontal volume kernel needs Q >= 3");
  const Vec grad = g.horizontal_gradient(x, x0);
  const double v = g.value(x, x0);
  if (!(v > 0.0)) throw Error(ErrorKind::SingularKernel, "volume kernel needs Gamma* > 0");
  return q / (q - 2.0) * grad.dot(g.A() * grad) / std::pow(v, 2.0 * (q - 1) / (q - 2));
}

double surface_kernel(const GreenFunction& g, const Vec& x0, const Vec& x) {
  if (g.is_carnot()) return kernel_KG(g, x0, x);
  return g.logarithmic() ? kernel_K2(g, x0, x) : kernel_K(g, x0, x);
}

double volume_kernel(const GreenFunction& g, const Vec& x0, const Vec& x) {
  if (g.is_carnot()) return kernel_MG(g, x0, x);
  return g.logarithmic() ? kernel_M2(g, x0, x) : kernel_M(g, x0, x);
}

double volume_kernel_singularity(const GreenFunction& g) {
  // M2 ~ d^{1/pi - 2} for the logarithmic kernel; the others stay bounded.
  return g.logarithmic() ? 2.0 - 1.0 / std::numbers::pi : 0.0;
}

}  // namespace mvf
