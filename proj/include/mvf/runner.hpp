#pragma once

#include <string>
#include <vector>

#include "mvf/config.hpp"
#include "mvf/mean_value.hpp"

namespace mvf {

enum class CellStatus { Pass, Fail, Rejected };
std::string_view to_string(CellStatus s);

struct CellResult {
  MeanValueReport report;
  CellStatus status = CellStatus::Rejected;
  std::string message;  // the library error for rejected cells
};

struct RunOptions {
  int jobs = 1;
  bool verbose = false;
};

// Evaluates every cell in the fixed order solution x center x radius x formula.
// Cell i uses the seed derive_seed(cfg.seed, i), independent of scheduling.
std::vector<CellResult> run_cells(const ExperimentConfig& cfg, const RunOptions& opt);

// 0 iff every cell passed.
int exit_code(const std::vector<CellResult>& cells);

// CSV with %.17g numbers; x0 coordinates separated by ';'. with_timing=false
// drops the seconds column (the part that is byte-reproducible).
std::string results_csv(const std::vector<CellResult>& cells, bool with_timing = true);
std::string results_json(const std::vector<CellResult>& cells);

// validate + run_cells + results.csv / results.json in cfg.output_dir.
int run(const ExperimentConfig& cfg, const RunOptions& opt);

struct SweepRow {
  int level = 0;
  QuadratureSpec quad;
  CellResult cell;
};

struct SweepSeries {
  std::string label;     // solution/formula/x0/r
  bool monotone = true;  // residual non-increasing up to a 1e-14 floor
  double mc_slope = 0.0; // log-log slope of the error estimate vs samples (Monte Carlo only)
};

struct SweepTable {
  std::vector<SweepRow> rows;
  std::vector<SweepSeries> series;
};

// Reruns all cells with quad.refined(level), level = 0..levels. Level 0 is
// identical to run_cells.
SweepTable convergence_sweep(const ExperimentConfig& cfg, int levels, const RunOptions& opt);
std::string convergence_csv(const SweepTable& table);

// convergence_sweep + convergence.csv in cfg.output_dir; exit code of level 0.
int sweep(const ExperimentConfig& cfg, const RunOptions& opt);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mvf
