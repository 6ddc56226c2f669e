#include "mvf/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "mvf/error.hpp"
#include "mvf/green.hpp"
#include "mvf/mean_value.hpp"

namespace mvf {

namespace {

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& msg) const {
    std::string where = origin_;
    if (node.IsDefined() && node.Mark().line >= 0) where += ":" + std::to_string(node.Mark().line + 1);
    throw Error(ErrorKind::Config, where + ": field '" + field + "': " + msg);
  }

  template <class T>
  T scalar(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, field, "cannot read '" + node.Scalar() + "'");
    }
  }

  std::vector<double> numbers(const YAML::Node& node, const std::string& field) const {
    if (!node.IsSequence()) fail(node, field, "expected a list of numbers");
    std::vector<double> out;
    for (const auto& v : node) out.push_back(scalar<double>(v, field));
    return out;
  }

  std::vector<std::string> strings(const YAML::Node& node, const std::string& field) const {
    if (node.IsScalar()) return {node.Scalar()};
    if (!node.IsSequence()) fail(node, field, "expected a name or a list of names");
    std::vector<std::string> out;
    for (const auto& v : node) out.push_back(scalar<std::string>(v, field));
    return out;
  }

  void only(const YAML::Node& map, const std::set<std::string>& keys, const std::string& section) const {
    for (const auto& kv : map) {
      const std::string k = kv.first.Scalar();
      if (!keys.count(k)) fail(kv.first, section.empty() ? k : section + "." + k, "unknown key");
    }
  }

 private:
  std::string origin_;
};

int positive_int(const Reader& rd, const YAML::Node& node, const std::string& field) {
  const int v = rd.scalar<int>(node, field);
  if (v < 1) rd.fail(node, field, "must be a positive integer");
  return v;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorKind::Config, origin + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  const Reader rd(origin);
  if (!root.IsMap()) rd.fail(root, "<root>", "expected a mapping");
  rd.only(root, {"setting", "operator", "green", "solutions", "centers", "radii", "formulas", "quadrature",
                 "tolerance", "seed", "sweep_levels", "output"},
          "");

  ExperimentConfig cfg;
  auto required = [&](const char* key) {
    const YAML::Node n = root[key];
    if (!n) rd.fail(root, key, "missing");
    return n;
  };
  if (root["setting"]) cfg.setting = rd.scalar<std::string>(root["setting"], "setting");
  cfg.op = rd.scalar<std::string>(required("operator"), "operator");
  cfg.green = rd.scalar<std::string>(required("green"), "green");
  cfg.solutions = rd.strings(required("solutions"), "solutions");
  if (cfg.solutions.empty()) rd.fail(root["solutions"], "solutions", "empty list");

  const YAML::Node centers = required("centers");
  if (!centers.IsSequence() || centers.size() == 0) rd.fail(centers, "centers", "expected a non-empty list of points");
  for (const auto& c : centers) {
    const std::vector<double> v = rd.numbers(c, "centers");
    if (v.empty()) rd.fail(c, "centers", "empty point");
    cfg.centers.push_back(Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())));
  }

  const YAML::Node radii = required("radii");
  cfg.radii = rd.numbers(radii, "radii");
  if (cfg.radii.empty()) rd.fail(radii, "radii", "empty list");
  for (double r : cfg.radii) {
    if (!(r > 0.0)) rd.fail(radii, "radii", "radii must be positive");
  }

  if (const YAML::Node f = root["formulas"]) {
    cfg.formulas = rd.strings(f, "formulas");
    if (cfg.formulas.empty()) rd.fail(f, "formulas", "empty list");
    for (const auto& name : cfg.formulas) {
      if (name != "surface" && name != "volume") rd.fail(f, "formulas", "expected surface or volume, got " + name);
    }
  }

  if (const YAML::Node q = root["quadrature"]) {
    if (!q.IsMap()) rd.fail(q, "quadrature", "expected a mapping");
    rd.only(q, {"polar_order", "azimuth_order", "radial_panels", "rho_order", "mc_samples", "error_estimate"},
            "quadrature");
    if (q["polar_order"]) cfg.quad.polar_order = positive_int(rd, q["polar_order"], "quadrature.polar_order");
    if (q["azimuth_order"]) cfg.quad.azimuth_order = positive_int(rd, q["azimuth_order"], "quadrature.azimuth_order");
    if (q["radial_panels"]) cfg.quad.radial_panels = positive_int(rd, q["radial_panels"], "quadrature.radial_panels");
    if (q["rho_order"]) cfg.quad.rho_order = positive_int(rd, q["rho_order"], "quadrature.rho_order");
    if (q["mc_samples"]) {
      const long long n = rd.scalar<long long>(q["mc_samples"], "quadrature.mc_samples");
      if (n < 0) rd.fail(q["mc_samples"], "quadrature.mc_samples", "must be non-negative");
      cfg.quad.mc_samples = static_cast<std::size_t>(n);
    }
    if (q["error_estimate"]) cfg.quad.estimate_error = rd.scalar<bool>(q["error_estimate"], "quadrature.error_estimate");
  }

  if (const YAML::Node t = root["tolerance"]) {
    cfg.tolerance = rd.scalar<double>(t, "tolerance");
    if (!(cfg.tolerance > 0.0)) rd.fail(t, "tolerance", "must be positive");
  }
  if (const YAML::Node s = root["seed"]) cfg.seed = rd.scalar<std::uint64_t>(s, "seed");
  if (const YAML::Node s = root["sweep_levels"]) {
    cfg.sweep_levels = rd.scalar<int>(s, "sweep_levels");
    if (cfg.sweep_levels < 0 || cfg.sweep_levels > 6) rd.fail(s, "sweep_levels", "must lie in 0..6");
  }
  if (const YAML::Node o = root["output"]) {
    if (!o.IsMap()) rd.fail(o, "output", "expected a mapping");
    rd.only(o, {"directory"}, "output");
    if (o["directory"]) cfg.output_dir = rd.scalar<std::string>(o["directory"], "output.directory");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::vector<std::string> resolved_solutions(const ExperimentConfig& cfg) {
  if (cfg.solutions.size() == 1 && cfg.solutions[0] == "all") {
    std::vector<std::string> out;
    for (const auto& s : manufactured_suite(make_green(cfg.green))) out.push_back(s.name);
    return out;
  }
  return cfg.solutions;
}

void validate(const ExperimentConfig& cfg) {
  const GreenFunction g = make_green(cfg.green);
  const CatalogOperator op = make_operator(cfg.op);
  check_pairing(op, g);
  if (!cfg.setting.empty() && cfg.setting != setting_name(g)) {
    throw Error(ErrorKind::Config, "field 'setting': " + cfg.setting + " does not match " + cfg.green + " (" +
                                       setting_name(g) + ")");
  }
  for (const auto& name : resolved_solutions(cfg)) find_solution(g, name);
  for (const Vec& c : cfg.centers) {
    if (c.size() != g.dim()) {
      throw Error(ErrorKind::Config, "field 'centers': expected points in dimension " + std::to_string(g.dim()));
    }
  }
  if (cfg.radii.empty()) throw Error(ErrorKind::Config, "field 'radii': empty list");
  cfg.quad.validate();
}

}  // namespace mvf
