#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "mvf/linalg.hpp"

namespace mvf {

// Neumaier summation; accumulation order changes results only at the ulp level.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

struct QuadratureSpec {
  int polar_order = 24;     // Gauss-Legendre nodes per polar angle / Koranyi latitude
  int azimuth_order = 48;   // trapezoid nodes in the azimuth
  int radial_panels = 8;    // geometric Gauss-Kronrod panels toward the pole
  int rho_order = 12;       // outer Gauss-Legendre rule of the iterated volume terms
  std::size_t mc_samples = 0;  // 0 selects deterministic chart quadrature on Carnot balls
  std::uint64_t seed = 1;
  bool estimate_error = true;
  bool embedded_radial = false;  // use the embedded Gauss weights of the radial panels

  void validate() const;
  // Orders scaled by 2^level (samples by 4^level).
  QuadratureSpec refined(int level) const;
  // The companion rule used for error estimates.
  QuadratureSpec coarse() const;
};

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n, double a, double b);

// Gauss-Kronrod (7,15) panels on [a, b], graded geometrically toward a; the
// outermost octaves are subdivided.
// Each node carries the Kronrod weight and the embedded Gauss weight (zero off
// the Gauss nodes), so one pass yields the integral and its error estimate.
struct PanelRule {
  std::vector<double> nodes;
  std::vector<double> kronrod;
  std::vector<double> gauss;
};

PanelRule graded_panels(int panels, double a, double b);

// Product rule on the unit sphere S^{dim-1}: nodes are unit vectors.
struct SphereRule {
  std::vector<Vec> directions;
  std::vector<double> weights;
};

SphereRule sphere_rule(int dim, int polar_order, int azimuth_order);

// Surface area of the unit sphere S^{dim-1}.
double unit_sphere_area(int dim);

// Deterministic uniform generator: mt19937_64 with an explicit bits-to-double
// map so that streams do not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  double uniform();  // in (0, 1)
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// Latin hypercube sample of n points in (0,1)^dim, row-major (point i at [i*dim, (i+1)*dim)).
std::vector<double> latin_hypercube(std::size_t n, int dim, std::uint64_t seed);

}  // namespace mvf
