#include "mvf/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "mvf/error.hpp"

namespace mvf {

void QuadratureSpec::validate() const {
  if (polar_order < 1 || azimuth_order < 1 || radial_panels < 1 || rho_order < 1) {
    throw Error(ErrorKind::InvalidArgument, "quadrature orders must be positive");
  }
}

QuadratureSpec QuadratureSpec::refined(int level) const {
  QuadratureSpec q = *this;
  const int f = 1 << level;
  q.polar_order *= f;
  q.azimuth_order *= f;
  q.rho_order *= f;
  q.radial_panels += level;
  q.mc_samples *= static_cast<std::size_t>(f) * static_cast<std::size_t>(f);
  return q;
}

QuadratureSpec QuadratureSpec::coarse() const {
  QuadratureSpec q = *this;
  q.polar_order = std::max(1, (polar_order * 2) / 3);
  q.azimuth_order = std::max(1, (azimuth_order * 2) / 3);
  q.rho_order = std::max(1, (rho_order * 2) / 3);
  q.mc_samples = mc_samples / 4;
  q.seed = seed ^ 0x9e3779b97f4a7c15ULL;
  q.embedded_radial = true;
  return q;
}

GaussRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "Gauss-Legendre order must be positive");
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.nodes[i] = mid - half * z;
    r.nodes[n - 1 - i] = mid + half * z;
    r.weights[i] = half * w;
    r.weights[n - 1 - i] = half * w;
  }
  return r;
}

PanelRule graded_panels(int panels, double a, double b) {
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
  using Gauss = boost::math::quadrature::gauss<double, 7>;
  const auto& kx = Kronrod::abscissa();
  const auto& kw = Kronrod::weights();
  const auto& gx = Gauss::abscissa();
  const auto& gw = Gauss::weights();

  // Gauss weight attached to each Kronrod abscissa (zero off the Gauss nodes).
  std::vector<double> gauss_at(kx.size(), 0.0);
  for (std::size_t i = 0; i < kx.size(); ++i) {
    for (std::size_t j = 0; j < gx.size(); ++j) {
      if (std::abs(kx[i] - gx[j]) < 1e-14) gauss_at[i] = gw[j];
    }
  }

  PanelRule rule;
  const double len = b - a;
  auto add_panel = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < kx.size(); ++i) {
      const int signs = (kx[i] == 0.0) ? 1 : 2;
      for (int s = 0; s < signs; ++s) {
        const double x = s == 0 ? kx[i] : -kx[i];
        rule.nodes.push_back(mid + half * x);
        rule.kronrod.push_back(half * kw[i]);
        rule.gauss.push_back(half * gauss_at[i]);
      }
    }
  };
  for (int p = 0; p < panels; ++p) {
    const double hi = a + len * std::ldexp(1.0, -p);
    const double lo = (p == panels - 1) ? a : a + len * std::ldexp(1.0, -(p + 1));
    // The two outer octaves are split further (4 and 2 pieces) so that smooth
    // integrands away from the pole are resolved as well as the graded part.
    const int pieces = p == 0 ? 4 : (p == 1 ? 2 : 1);
    for (int k = 0; k < pieces; ++k) add_panel(lo + (hi - lo) * k / pieces, lo + (hi - lo) * (k + 1) / pieces);
  }
  return rule;
}

double unit_sphere_area(int dim) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

SphereRule sphere_rule(int dim, int polar_order, int azimuth_order) {
  if (dim < 2 || dim > kMaxDim) throw Error(ErrorKind::InvalidArgument, "sphere rule dimension out of range");
  SphereRule rule;
  // Azimuth: offset trapezoid, exact for trigonometric polynomials of degree < azimuth_order.
  const int naz = std::max(azimuth_order, 3);
  std::vector<double> phis(naz);
  for (int i = 0; i < naz; ++i) phis[i] = 2.0 * std::numbers::pi * (i + 0.5) / naz;
  const double wphi = 2.0 * std::numbers::pi / naz;

  // Polar angles theta_1..theta_{dim-2}; theta_k carries weight sin^{dim-1-k}.
  struct Polar {
    std::vector<double> cos_t, sin_t, w;
  };
  std::vector<Polar> polars;
  for (int k = 1; k <= dim - 2; ++k) {
    const int power = dim - 1 - k;
    Polar p;
    if (power == 1) {
      const GaussRule g = gauss_legendre(polar_order, -1.0, 1.0);
      for (int i = 0; i < polar_order; ++i) {
        p.cos_t.push_back(g.nodes[i]);
        p.sin_t.push_back(std::sqrt(1.0 - g.nodes[i] * g.nodes[i]));
        p.w.push_back(g.weights[i]);
      }
    } else {
      const GaussRule g = gauss_legendre(polar_order, 0.0, std::numbers::pi);
      for (int i = 0; i < polar_order; ++i) {
        p.cos_t.push_back(std::cos(g.nodes[i]));
        p.sin_t.push_back(std::sin(g.nodes[i]));
        p.w.push_back(g.weights[i] * std::pow(std::sin(g.nodes[i]), power));
      }
    }
    polars.push_back(std::move(p));
  }

  std::vector<int> idx(polars.size(), 0);
  while (true) {
    double w = wphi;
    for (std::size_t k = 0; k < polars.size(); ++k) w *= polars[k].w[idx[k]];
    for (int a = 0; a < naz; ++a) {
      Vec omega(dim);
      double prefix = 1.0;
      for (std::size_t k = 0; k < polars.size(); ++k) {
        omega(static_cast<Eigen::Index>(k)) = prefix * polars[k].cos_t[idx[k]];
        prefix *= polars[k].sin_t[idx[k]];
      }
      omega(dim - 2) = prefix * std::cos(phis[a]);
      omega(dim - 1) = prefix * std::sin(phis[a]);
      rule.directions.push_back(omega);
      rule.weights.push_back(w);
    }
    std::size_t k = 0;
    while (k < polars.size() && ++idx[k] == polar_order) idx[k++] = 0;
    if (k == polars.size()) break;
  }
  return rule;
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

double Rng::uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  // splitmix64 finalizer
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<double> latin_hypercube(std::size_t n, int dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> pts(n * static_cast<std::size_t>(dim));
  std::vector<std::uint32_t> perm(n);
  for (int d = 0; d < dim; ++d) {
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    for (std::size_t i = 0; i < n; ++i) {
      pts[i * dim + d] = (perm[i] + rng.uniform()) / static_cast<double>(n);
    }
  }
  return pts;
}

}  // namespace mvf
