#include "mvf/runner.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <thread>

#include "mvf/error.hpp"

namespace mvf {

std::string_view to_string(CellStatus s) {
  switch (s) {
    case CellStatus::Pass: return "pass";
    case CellStatus::Fail: return "fail";
    case CellStatus::Rejected: return "rejected";
  }
  return "?";
}

namespace {

struct Cell {
  std::string solution;
  Vec x0;
  double r;
  std::string formula;
};

std::vector<Cell> enumerate(const ExperimentConfig& cfg) {
  std::vector<Cell> out;
  for (const auto& s : resolved_solutions(cfg)) {
    for (const Vec& c : cfg.centers) {
      for (double r : cfg.radii) {
        for (const auto& f : cfg.formulas) out.push_back({s, c, r, f});
      }
    }
  }
  return out;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// RFC 4180 quoting; catalog names such as constA:diag=4,1,1 contain commas.
std::string field(const std::string& v) {
  if (v.find_first_of(",\"\n") == std::string::npos) return v;
  std::string q = "\"";
  for (char ch : v) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

std::string point(const Vec& x) {
  std::string s;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) s += ';';
    s += num(x(i));
  }
  return s;
}

std::vector<CellResult> evaluate(const ExperimentConfig& cfg, const QuadratureSpec& quad, const RunOptions& opt) {
  const GreenFunction g = make_green(cfg.green);
  const CatalogOperator op = make_operator(cfg.op);
  const std::vector<Cell> cells = enumerate(cfg);
  std::vector<CellResult> out(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& c = cells[i];
      QuadratureSpec q = quad;
      q.seed = derive_seed(cfg.seed, i);
      CellResult& res = out[i];
      MeanValueReport& rep = res.report;
      rep.setting = setting_name(g);
      rep.op = op.name;
      rep.green = g.name();
      rep.solution = c.solution;
      rep.formula = c.formula;
      rep.x0 = c.x0;
      rep.r = c.r;
      rep.seed = q.seed;
      try {
        const ManufacturedSolution sol = find_solution(g, c.solution);
        rep = c.formula == "surface" ? mvf_surface(g, op, sol, c.x0, c.r, q) : mvf_volume(g, op, sol, c.x0, c.r, q);
        res.status = rep.residual <= cfg.tolerance ? CellStatus::Pass : CellStatus::Fail;
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::Config || e.kind() == ErrorKind::Mismatch) throw;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        rep.lhs = rep.surface = rep.source = rep.drift = rep.rhs = rep.residual = rep.err_estimate = nan;
        res.status = CellStatus::Rejected;
        res.message = e.what();
      }
      if (opt.verbose) {
        std::lock_guard lock(log_mutex);
        std::cerr << "[" << i + 1 << "/" << cells.size() << "] " << c.solution << " " << c.formula << " r=" << c.r
                  << " residual=" << rep.residual << " " << to_string(res.status)
                  << (res.message.empty() ? "" : " (" + res.message + ")") << "\n";
      }
    }
  };

  const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int j = 0; j < jobs; ++j) {
    pool.emplace_back([&] {
      try {
        worker();
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = cells.size();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Config, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::Config, "write failed for " + path.string());
}

std::filesystem::path output_dir(const ExperimentConfig& cfg) {
  const std::filesystem::path dir(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Config, "cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

}  // namespace

std::vector<CellResult> run_cells(const ExperimentConfig& cfg, const RunOptions& opt) {
  return evaluate(cfg, cfg.quad, opt);
}

int exit_code(const std::vector<CellResult>& cells) {
  for (const auto& c : cells) {
    if (c.status != CellStatus::Pass) return 1;
  }
  return 0;
}

std::string results_csv(const std::vector<CellResult>& cells, bool with_timing) {
  std::string s = "setting,op,solution,formula,x0,r,lhs,surface,source,drift,residual,err_estimate,";
  s += with_timing ? "seconds,seed,status\n" : "seed,status\n";
  for (const auto& c : cells) {
    const MeanValueReport& r = c.report;
    s += field(r.setting) + "," + field(r.op) + "," + field(r.solution) + "," + r.formula + "," + point(r.x0) + "," + num(r.r) + "," +
         num(r.lhs) + "," + num(r.surface) + "," + num(r.source) + "," + num(r.drift) + "," + num(r.residual) + "," +
         num(r.err_estimate) + ",";
    if (with_timing) s += num(r.seconds) + ",";
    s += std::to_string(r.seed) + "," + std::string(to_string(c.status)) + "\n";
  }
  return s;
}

std::string results_json(const std::vector<CellResult>& cells) {
  // JSON has no NaN; rejected cells carry null numbers and the error message.
  auto n = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cells) {
    const MeanValueReport& r = c.report;
    nlohmann::json j;
    j["setting"] = r.setting;
    j["op"] = r.op;
    j["green"] = r.green;
    j["solution"] = r.solution;
    j["formula"] = r.formula;
    j["x0"] = std::vector<double>(r.x0.data(), r.x0.data() + r.x0.size());
    j["r"] = r.r;
    j["lhs"] = n(r.lhs);
    j["surface"] = n(r.surface);
    j["source"] = n(r.source);
    j["drift"] = n(r.drift);
    j["rhs"] = n(r.rhs);
    j["residual"] = n(r.residual);
    j["err_estimate"] = n(r.err_estimate);
    j["err_terms"] = {{"surface", n(r.err_surface)}, {"source", n(r.err_source)}, {"drift", n(r.err_drift)}};
    j["seconds"] = r.seconds;
    j["seed"] = r.seed;
    j["status"] = std::string(to_string(c.status));
    if (!c.message.empty()) j["message"] = c.message;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

int run(const ExperimentConfig& cfg, const RunOptions& opt) {
  validate(cfg);
  const auto dir = output_dir(cfg);
  const std::vector<CellResult> cells = run_cells(cfg, opt);
  write_file(dir / "results.csv", results_csv(cells));
  write_file(dir / "results.json", results_json(cells));
  return exit_code(cells);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::InvalidArgument, "slope needs two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SweepTable convergence_sweep(const ExperimentConfig& cfg, int levels, const RunOptions& opt) {
  validate(cfg);
  if (levels < 0) throw Error(ErrorKind::Config, "refinement levels must be non-negative");
  SweepTable t;
  std::vector<std::vector<CellResult>> by_level;
  for (int l = 0; l <= levels; ++l) {
    const QuadratureSpec q = cfg.quad.refined(l);
    by_level.push_back(evaluate(cfg, q, opt));
    for (const auto& c : by_level.back()) t.rows.push_back({l, q, c});
  }
  const std::size_t ncell = by_level.front().size();
  for (std::size_t i = 0; i < ncell; ++i) {
    const MeanValueReport& r0 = by_level[0][i].report;
    SweepSeries s;
    s.label = r0.solution + "/" + r0.formula + "/" + point(r0.x0) + "/" + num(r0.r);
    std::vector<double> samples, errs;
    for (int l = 0; l <= levels; ++l) {
      const double res = by_level[l][i].report.residual;
      if (l > 0) {
        const double prev = by_level[l - 1][i].report.residual;
        if (!(res <= std::max(prev, 1e-14))) s.monotone = false;
      }
      const std::size_t n = cfg.quad.refined(l).mc_samples;
      const double e = by_level[l][i].report.err_estimate;
      if (n > 0 && e > 0.0) {
        samples.push_back(static_cast<double>(n));
        errs.push_back(e);
      }
    }
    if (samples.size() >= 2) s.mc_slope = loglog_slope(samples, errs);
    t.series.push_back(s);
  }
  return t;
}

std::string convergence_csv(const SweepTable& table) {
  std::string s =
      "level,solution,formula,x0,r,polar_order,azimuth_order,radial_panels,rho_order,mc_samples,residual,err_estimate,"
      "status\n";
  for (const auto& row : table.rows) {
    const MeanValueReport& r = row.cell.report;
    const QuadratureSpec& q = row.quad;
    s += std::to_string(row.level) + "," + r.solution + "," + r.formula + "," + point(r.x0) + "," + num(r.r) + "," +
         std::to_string(q.polar_order) + "," + std::to_string(q.azimuth_order) + "," +
         std::to_string(q.radial_panels) + "," + std::to_string(q.rho_order) + "," + std::to_string(q.mc_samples) +
         "," + num(r.residual) + "," + num(r.err_estimate) + "," + std::string(to_string(row.cell.status)) + "\n";
  }
  return s;
}

int sweep(const ExperimentConfig& cfg, const RunOptions& opt) {
  const auto dir = output_dir(cfg);
  const SweepTable t = convergence_sweep(cfg, cfg.sweep_levels, opt);
  write_file(dir / "convergence.csv", convergence_csv(t));
  std::vector<CellResult> level0;
  for (const auto& row : t.rows) {
    if (row.level == 0) level0.push_back(row.cell);
  }
  for (const auto& s : t.series) {
    std::cout << s.label << ": " << (s.monotone ? "monotone decay" : "non-monotone");
    if (s.mc_slope != 0.0) std::cout << ", error ~ samples^" << num(s.mc_slope);
    std::cout << "\n";
  }
  return exit_code(level0);
}

}  // namespace mvf
