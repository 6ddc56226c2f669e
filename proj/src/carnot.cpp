#include "mvf/carnot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mvf/error.hpp"
#include "mvf/quadrature.hpp"

namespace mvf {

StratifiedGroup StratifiedGroup::abelian(int n) {
  if (n < 1 || n > kMaxDim) throw Error(ErrorKind::InvalidArgument, "abelian group dimension out of range");
  StratifiedGroup g;
  g.name_ = "abelian:" + std::to_string(n);
  g.dim_ = n;
  g.layers_ = {n};
  g.law_ = [](const Vec& x, const Vec& y) { return Vec(x + y); };
  g.inverse_ = [](const Vec& x) { return Vec(-x); };
  g.fields_ = [n](const Vec&) { return Mat(Mat::Identity(n, n)); };
  g.field_partial_ = [n](const Vec&, int) { return Mat(Mat::Zero(n, n)); };
  g.left_jacobian_ = [n](const Vec&) { return Mat(Mat::Identity(n, n)); };
  return g;
}

StratifiedGroup StratifiedGroup::heisenberg() {
  StratifiedGroup g;
  g.name_ = "heisenberg1";
  g.dim_ = 3;
  g.layers_ = {2, 1};
  g.law_ = [](const Vec& p, const Vec& q) {
    return make_vec({p(0) + q(0), p(1) + q(1), p(2) + q(2) + 2.0 * (p(0) * q(1) - q(0) * p(1))});
  };
  g.inverse_ = [](const Vec& p) { return Vec(-p); };
  g.fields_ = [](const Vec& p) {
    Mat phi(3, 2);
    phi << 1.0, 0.0, 0.0, 1.0, -2.0 * p(1), 2.0 * p(0);
    return phi;
  };
  g.field_partial_ = [](const Vec&, int k) {
    Mat d = Mat::Zero(3, 2);
    if (k == 0) d(2, 1) = 2.0;
    if (k == 1) d(2, 0) = -2.0;
    return d;
  };
  g.left_jacobian_ = [](const Vec& y) {
    Mat j = Mat::Identity(3, 3);
    j(2, 0) = -2.0 * y(1);
    j(2, 1) = 2.0 * y(0);
    return j;
  };
  return g;
}

int StratifiedGroup::homogeneous_dim() const {
  int q = 0;
  for (std::size_t j = 0; j < layers_.size(); ++j) q += static_cast<int>(j + 1) * layers_[j];
  return q;
}

int StratifiedGroup::layer_of(int coordinate) const {
  int start = 0;
  for (std::size_t j = 0; j < layers_.size(); ++j) {
    start += layers_[j];
    if (coordinate < start) return static_cast<int>(j + 1);
  }
  throw Error(ErrorKind::InvalidArgument, "coordinate index out of range");
}

Mat StratifiedGroup::dilation_matrix(double lambda) const {
  Mat d = Mat::Zero(dim_, dim_);
  for (int k = 0; k < dim_; ++k) d(k, k) = std::pow(lambda, layer_of(k));
  return d;
}

Vec StratifiedGroup::dilate(double lambda, const Vec& x) const {
  Vec y = x;
  for (int k = 0; k < dim_; ++k) y(k) *= std::pow(lambda, layer_of(k));
  return y;
}

Vec StratifiedGroup::flow(int j, const Vec& x, double s) const {
  Vec e = Vec::Zero(dim_);
  e(j) = s;
  return compose(x, e);
}

int StratifiedGroup::hormander_rank(const Vec& x) const {
  if (step() > 2) throw Error(ErrorKind::InvalidArgument, "rank check implemented for step <= 2");
  const int m = horizontal_dim();
  const Mat phi = fields(x);
  Mat span(dim_, m + m * (m - 1) / 2);
  span.leftCols(m) = phi;
  int col = m;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      // [X_i, X_j] = (D phi^j) phi^i - (D phi^i) phi^j
      Vec br = Vec::Zero(dim_);
      for (int k = 0; k < dim_; ++k) {
        const Mat dk = field_partial(x, k);
        br += phi(k, i) * dk.col(j) - phi(k, j) * dk.col(i);
      }
      span.col(col++) = br;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd(span.leftCols(col)));
  lu.setThreshold(1e-10);
  return static_cast<int>(lu.rank());
}

HomogeneousNorm::HomogeneousNorm(StratifiedGroup group, std::vector<double> weights)
    : group_(std::move(group)), weights_(std::move(weights)) {
  if (static_cast<int>(weights_.size()) != group_.step()) {
    throw Error(ErrorKind::InvalidArgument, "need one weight per layer");
  }
  if (weights_.front() != 1.0) throw Error(ErrorKind::InvalidArgument, "first-layer weight must be 1");
  for (double w : weights_) {
    if (!(w > 0.0 && w <= 1.0)) throw Error(ErrorKind::InvalidArgument, "weights must lie in (0,1]");
  }
}

HomogeneousNorm HomogeneousNorm::unit_weights(const StratifiedGroup& group) {
  return HomogeneousNorm(group, std::vector<double>(group.step(), 1.0));
}

double HomogeneousNorm::value(const Vec& x) const {
  double best = 0.0;
  int start = 0;
  for (int j = 0; j < group_.step(); ++j) {
    const int n = group_.layer_dims()[j];
    const double block = x.segment(start, n).norm();
    best = std::max(best, weights_[j] * std::pow(block, 1.0 / (j + 1)));
    start += n;
  }
  return best;
}

double HomogeneousNorm::distance(const Vec& x, const Vec& y) const {
  return value(group_.compose(group_.inverse(y), x));
}

double lie_derivative(const StratifiedGroup& g, int j, const ScalarField& u, const Vec& x) {
  if (j < 0 || j >= g.horizontal_dim()) throw Error(ErrorKind::InvalidArgument, "Lie derivative index out of range");
  return g.fields(x).col(j).dot(u.gradient(x));
}

Vec horizontal_part(const StratifiedGroup& g, const Vec& x, const Vec& euclidean_gradient) {
  return g.fields(x).transpose() * euclidean_gradient;
}

Vec horizontal_gradient(const StratifiedGroup& g, const ScalarField& u, const Vec& x) {
  return horizontal_part(g, x, u.gradient(x));
}

double horizontal_divergence(const StratifiedGroup& g, std::span<const ScalarField> f, const Vec& x) {
  if (static_cast<int>(f.size()) != g.horizontal_dim()) {
    throw Error(ErrorKind::InvalidArgument, "horizontal section needs m components");
  }
  double d = 0.0;
  for (int j = 0; j < g.horizontal_dim(); ++j) d += lie_derivative(g, j, f[j], x);
  return d;
}

Mat horizontal_hessian(const StratifiedGroup& g, const ScalarField& u, const Vec& x) {
  const int m = g.horizontal_dim();
  const Mat phi = g.fields(x);
  const Vec grad = u.gradient(x);
  const Mat hess = u.hessian(x);
  // X_i X_j u = phi^i . H phi^j + sum_k phi^i_k (d_k phi^j) . grad u
  Mat out = phi.transpose() * hess * phi;
  for (int k = 0; k < g.dim(); ++k) {
    const Vec dphi_grad = g.field_partial(x, k).transpose() * grad;  // (d_k phi^j . grad)_j
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) out(i, j) += phi(k, i) * dphi_grad(j);
    }
  }
  return out;
}

ScalarField left_translate(const StratifiedGroup& g, const ScalarField& u, const Vec& y) {
  const Mat jac = g.left_translation_jacobian(y);
  return ScalarField(
      u.dim(), [g, u, y](const Vec& x) { return u.value(g.compose(y, x)); },
      [g, u, y, jac](const Vec& x) { return Vec(jac.transpose() * u.gradient(g.compose(y, x))); },
      [g, u, y, jac](const Vec& x) { return Mat(jac.transpose() * u.hessian(g.compose(y, x)) * jac); });
}

ScalarField dilate_field(const StratifiedGroup& g, const ScalarField& u, double lambda) {
  const Mat d = g.dilation_matrix(lambda);
  return ScalarField(
      u.dim(), [g, u, lambda](const Vec& x) { return u.value(g.dilate(lambda, x)); },
      [g, u, lambda, d](const Vec& x) { return Vec(d * u.gradient(g.dilate(lambda, x))); },
      [g, u, lambda, d](const Vec& x) { return Mat(d * u.hessian(g.dilate(lambda, x)) * d); });
}

ScalarField koranyi_gauge() {
  auto parts = [](const Vec& p, double& s, Vec& ds, Mat& hs) {
    const double x = p(0), y = p(1), t = p(2);
    const double q = x * x + y * y;
    s = q * q + t * t;
    ds = make_vec({4.0 * x * q, 4.0 * y * q, 2.0 * t});
    hs = Mat::Zero(3, 3);
    hs(0, 0) = 4.0 * q + 8.0 * x * x;
    hs(1, 1) = 4.0 * q + 8.0 * y * y;
    hs(0, 1) = hs(1, 0) = 8.0 * x * y;
    hs(2, 2) = 2.0;
  };
  return ScalarField(
             3,
             [](const Vec& p) {
               const double q = p(0) * p(0) + p(1) * p(1);
               return std::pow(q * q + p(2) * p(2), 0.25);
             },
             [parts](const Vec& p) {
               double s;
               Vec ds;
               Mat hs;
               parts(p, s, ds, hs);
               return Vec(0.25 * std::pow(s, -0.75) * ds);
             },
             [parts](const Vec& p) {
               double s;
               Vec ds;
               Mat hs;
               parts(p, s, ds, hs);
               return Mat(0.25 * std::pow(s, -0.75) * hs - (3.0 / 16.0) * std::pow(s, -1.75) * ds * ds.transpose());
             })
      .with_label("koranyi");
}

SubellipticOperator::SubellipticOperator(StratifiedGroup group, MatrixField a, double lambda, double Lambda)
    : group_(std::move(group)), a_(std::move(a)), lambda_(lambda), Lambda_(Lambda) {
  if (!(lambda > 0.0 && lambda < Lambda)) throw Error(ErrorKind::InvalidArgument, "need 0 < lambda < Lambda");
  if (a_.size() != group_.horizontal_dim() || a_.ambient_dim() != group_.dim()) {
    throw Error(ErrorKind::InvalidArgument, "coefficient matrix must be m x m over the group");
  }
}

SubellipticOperator SubellipticOperator::sublaplacian(const StratifiedGroup& group) {
  const int m = group.horizontal_dim();
  return SubellipticOperator(group, MatrixField::constant(Mat::Identity(m, m), group.dim()), 0.5, 2.0);
}

Vec SubellipticOperator::b(const Vec& x) const {
  const int m = group_.horizontal_dim();
  if (a_.is_constant()) return Vec::Zero(m);
  const Mat phi = group_.fields(x);
  Vec out = Vec::Zero(m);
  // X_j a_ij = sum_k phi^j_k d_k a_ij
  for (int k = 0; k < group_.dim(); ++k) {
    const Mat dk = a_.partial(x, k);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) out(i) += phi(k, j) * dk(i, j);
    }
  }
  return out;
}

double SubellipticOperator::c(const Vec& x) const {
  if (a_.is_constant()) return 0.0;
  const int m = group_.horizontal_dim();
  const int n = group_.dim();
  const Mat phi = group_.fields(x);
  double sum = 0.0;
  // X_i X_j a = sum_kl phi^i_k phi^j_l d_kl a + sum_kl phi^i_k (d_k phi^j_l) d_l a
  for (int k = 0; k < n; ++k) {
    const Mat dphi = group_.field_partial(x, k);
    for (int l = 0; l < n; ++l) {
      const Mat dkl = a_.second_partial(x, k, l);
      const Mat dl = a_.partial(x, l);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) sum += phi(k, i) * (phi(l, j) * dkl(i, j) + dphi(l, j) * dl(i, j));
      }
    }
  }
  return sum;
}

void SubellipticOperator::check_ellipticity(std::span<const Vec> samples) const {
  for (const Vec& x : samples) {
    const Mat a = a_.value(x);
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw Error(ErrorKind::InvalidArgument, "A not symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    if (es.eigenvalues().minCoeff() < lambda_ || es.eigenvalues().maxCoeff() > Lambda_) {
      throw Error(ErrorKind::InvalidArgument, "eigenvalues of A(x) leave [lambda, Lambda]");
    }
  }
}

double apply_subelliptic_adjoint(const SubellipticOperator& op, const ScalarField& u, const Vec& x) {
  return op.A().value(x).cwiseProduct(horizontal_hessian(op.group(), u, x)).sum();
}

double apply_subelliptic(const SubellipticOperator& op, const ScalarField& u, const Vec& x) {
  double v = apply_subelliptic_adjoint(op, u, x);
  if (!op.A().is_constant()) {
    v += 2.0 * op.b(x).dot(horizontal_gradient(op.group(), u, x)) + op.c(x) * u.value(x);
  }
  if (!std::isfinite(v)) throw Error(ErrorKind::FieldEvaluation, "non-finite subelliptic operator value");
  return v;
}

namespace {

Vec random_in_box(Rng& rng, int n) {
  Vec x(n);
  for (int k = 0; k < n; ++k) x(k) = 2.0 * rng.uniform() - 1.0;
  return x;
}

std::vector<double> layer_weights(int step, double eps) {
  std::vector<double> w(step, eps);
  w[0] = 1.0;
  return w;
}

}  // namespace

WeightsFit triangle_audit(const HomogeneousNorm& norm, std::size_t samples, std::uint64_t seed) {
  Rng rng(seed);
  const int n = norm.group().dim();
  WeightsFit fit;
  fit.weights = norm.weights();
  fit.samples = samples;
  fit.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec x = random_in_box(rng, n), y = random_in_box(rng, n), z = random_in_box(rng, n);
    const double dxz = norm.distance(x, z);
    const double margin = dxz - norm.distance(x, y) - norm.distance(y, z);
    fit.max_violation = std::max(fit.max_violation, margin);
    if (margin > 1e-12 * (1.0 + dxz)) ++fit.violations;
  }
  return fit;
}

WeightsFit d_infty_weights_fit(const StratifiedGroup& g, std::size_t samples, std::uint64_t seed) {
  if (g.step() == 1) return triangle_audit(HomogeneousNorm::unit_weights(g), samples, seed);
  WeightsFit last;
  for (int i = 20; i >= 1; --i) {
    const double eps = 0.05 * i;
    last = triangle_audit(HomogeneousNorm(g, layer_weights(g.step(), eps)), samples, seed);
    if (last.violations == 0) return last;
  }
  return last;
}

namespace {

// Euclidean measure of {w in plane : ||z^{-1} o w|| < 1} on a midpoint grid.
double slice_measure(const HomogeneousNorm& norm, const Mat& basis, const std::vector<double>& extent, const Vec& z,
                     int grid) {
  const StratifiedGroup& g = norm.group();
  const int k = static_cast<int>(basis.cols());
  const Vec zinv = g.inverse(z);
  std::vector<int> idx(k, 0);
  double cell = 1.0;
  for (int a = 0; a < k; ++a) cell *= 2.0 * extent[a] / grid;
  std::size_t inside = 0;
  while (true) {
    Vec w = Vec::Zero(g.dim());
    for (int a = 0; a < k; ++a) {
      const double c = -extent[a] + (idx[a] + 0.5) * 2.0 * extent[a] / grid;
      w += c * basis.col(a);
    }
    if (norm.value(g.compose(zinv, w)) < 1.0) ++inside;
    int a = 0;
    while (a < k && ++idx[a] == grid) idx[a++] = 0;
    if (a == k) break;
  }
  return static_cast<double>(inside) * cell;
}

}  // namespace

SphericalFactor spherical_factor_estimate(const HomogeneousNorm& norm, const Vec& horizontal_direction,
                                          std::size_t candidates, std::uint64_t seed, int grid) {
  const StratifiedGroup& g = norm.group();
  const int n = g.dim();
  const int m = g.horizontal_dim();
  if (horizontal_direction.size() != m || horizontal_direction.norm() == 0.0) {
    throw Error(ErrorKind::InvalidArgument, "need a nonzero horizontal direction");
  }
  // Orthonormal basis of nu^perp inside V_1, followed by the vertical axes.
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(m, m);
  h.col(0) = horizontal_direction.normalized();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(h);
  const Eigen::MatrixXd q = qr.householderQ();
  Mat basis = Mat::Zero(n, n - 1);
  for (int a = 1; a < m; ++a) basis.block(0, a - 1, m, 1) = q.col(a);
  for (int k = m; k < n; ++k) basis(k, k - 1) = 1.0;

  // ||w|| < 2 on B(z,1) for ||z|| < 1, so |w_(j)| < (2/eps_j)^j.
  std::vector<double> extent(n - 1);
  for (int a = 0; a < n - 1; ++a) {
    const int layer = (a < m - 1) ? 1 : g.layer_of(a + 1);
    extent[a] = std::pow(2.0 / norm.weights()[layer - 1], layer);
  }

  Rng rng(seed);
  const int search_grid = std::max(16, grid / 4);
  Vec best = Vec::Zero(n);
  double best_val = slice_measure(norm, basis, extent, best, search_grid);
  for (std::size_t c = 0; c < candidates; ++c) {
    Vec z = random_in_box(rng, n);
    if (norm.value(z) >= 1.0) continue;
    const double v = slice_measure(norm, basis, extent, z, search_grid);
    if (v > best_val) {
      best_val = v;
      best = z;
    }
  }
  // Compass search around the best candidate.
  double step = 0.25;
  while (step > 1e-3) {
    bool moved = false;
    for (int k = 0; k < n && !moved; ++k) {
      for (double sgn : {1.0, -1.0}) {
        Vec z = best;
        z(k) += sgn * step;
        if (norm.value(z) >= 1.0) continue;
        const double v = slice_measure(norm, basis, extent, z, search_grid);
        if (v > best_val) {
          best_val = v;
          best = z;
          moved = true;
          break;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  SphericalFactor out;
  out.maximizer = best;
  out.value = slice_measure(norm, basis, extent, best, grid);
  out.error = std::abs(out.value - slice_measure(norm, basis, extent, best, grid / 2));
  return out;
}

MetricEquivalence fit_metric_equivalence(const HomogeneousNorm& norm, std::size_t samples, std::uint64_t seed) {
  Rng rng(seed);
  const int n = norm.group().dim();
  MetricEquivalence eq;
  eq.c_minus = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    Vec x(n), y(n);
    for (int k = 0; k < n; ++k) {
      x(k) = rng.uniform();
      y(k) = rng.uniform();
    }
    const double e = (x - y).norm();
    if (e < 1e-12) continue;
    const double d = norm.distance(x, y);
    eq.c_minus = std::min(eq.c_minus, d / e);
    eq.c_plus = std::max(eq.c_plus, d / std::pow(e, 1.0 / norm.group().step()));
  }
  return eq;
}

}  // namespace mvf
