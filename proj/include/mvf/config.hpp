#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvf/linalg.hpp"
#include "mvf/quadrature.hpp"

namespace mvf {

// One experiment: every (solution, center, radius, formula) cell is run.
// The YAML schema is documented in README.md.
struct ExperimentConfig {
  std::string setting;  // optional; checked against the green function when present
  std::string op;
  std::string green;
  std::vector<std::string> solutions;  // "all" expands to the whole manufactured suite
  std::vector<Vec> centers;
  std::vector<double> radii;
  std::vector<std::string> formulas{"surface", "volume"};
  QuadratureSpec quad;
  double tolerance = 1e-8;
  std::uint64_t seed = 1;
  int sweep_levels = 3;
  std::string output_dir = "mvf-out";
};

// Parse errors carry "<origin>:<line>: field '<name>': ..." diagnostics.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::string& path);

// Catalog lookups, pairing, setting, solution names and dimensions. Throws
// Config or Mismatch; run() calls this before any cell is evaluated.
void validate(const ExperimentConfig& cfg);

// Solution names after expanding "all".
std::vector<std::string> resolved_solutions(const ExperimentConfig& cfg);

}  // namespace mvf
