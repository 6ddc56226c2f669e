#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mvf/carnot.hpp"
#include "mvf/elliptic.hpp"
#include "mvf/green.hpp"
#include "mvf/region.hpp"

namespace mvf {

struct ManufacturedSolution {
  std::string name;
  ScalarField u;
  ScalarField f;  // L u in closed form
  bool f_zero = false;
};

// Solutions for the operator paired with g (constant A, b, c):
//   Euclidean: one, x1, x1sq-x2sq, x1x2, normsq, and exp_kx1 (c != 0) / exp_minus_bx (b != 0)
//   H^1:       one, x, y, t, xsq-ysq, xy, xsq (f = 2), tx (f = -4y)
std::vector<ManufacturedSolution> manufactured_suite(const GreenFunction& g);
ManufacturedSolution find_solution(const GreenFunction& g, const std::string& name);

// An operator from the catalog: "laplace:N", "constA:diag=...", "yukawa:k=...",
// "drift:b=...", "sublaplacian:h1".
struct CatalogOperator {
  std::string name;
  std::optional<EllipticOperator> euclidean;
  std::optional<SubellipticOperator> carnot;
};
CatalogOperator make_operator(const std::string& text);

// Throws Mismatch unless g is a fundamental solution of the adjoint of op:
// same setting and coefficients, and a vanishing adjoint residual off the pole.
void check_pairing(const CatalogOperator& op, const GreenFunction& g);

struct MeanValueReport {
  std::string setting;
  std::string op;
  std::string green;
  std::string solution;
  std::string formula;  // "surface" or "volume"
  Vec x0;
  double r = 0.0;
  double lhs = 0.0;
  double surface = 0.0;  // surface kernel term, or the M term of the volume formula
  double source = 0.0;
  double drift = 0.0;    // (div b - c) term
  double rhs = 0.0;
  double residual = 0.0;
  double err_surface = 0.0;
  double err_source = 0.0;
  double err_drift = 0.0;
  double err_estimate = 0.0;
  double seconds = 0.0;
  std::uint64_t seed = 0;
};

MeanValueReport mvf_surface(const GreenFunction& g, const CatalogOperator& op, const ManufacturedSolution& sol,
                            const Vec& x0, double r, const QuadratureSpec& quad);
MeanValueReport mvf_volume(const GreenFunction& g, const CatalogOperator& op, const ManufacturedSolution& sol,
                           const Vec& x0, double r, const QuadratureSpec& quad);

std::string setting_name(const GreenFunction& g);

}  // namespace mvf
