#include "gridilc/scenario.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace gridilc {

namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& what) {
  std::ostringstream msg;
  msg << "config";
  if (!node.Mark().is_null()) msg << " line " << node.Mark().line + 1;
  msg << ", field '" << field << "': " << what;
  throw ConfigError(msg.str());
}

void check_keys(const YAML::Node& node, const std::string& section, const std::set<std::string>& allowed) {
  if (!node.IsMap()) fail(node, section, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, section + "." + key, "unknown field");
  }
}

template <typename T>
void read(const YAML::Node& parent, const std::string& section, const char* key, T& out) {
  const YAML::Node n = parent[key];
  if (!n) return;
  try {
    out = n.as<T>();
  } catch (const YAML::Exception&) {
    fail(n, section + "." + key, "wrong type");
  }
}

std::vector<double> read_list(const YAML::Node& n, const std::string& field) {
  try {
    if (n.IsScalar()) return {n.as<double>()};
    return n.as<std::vector<double>>();
  } catch (const YAML::Exception&) {
    fail(n, field, "expected a number or a list of numbers");
  }
}

Vec broadcast(const YAML::Node& n, const std::string& field, int size) {
  const std::vector<double> v = read_list(n, field);
  if (v.size() == 1) return Vec::Constant(size, v[0]);
  if (static_cast<int>(v.size()) != size)
    fail(n, field, "has " + std::to_string(v.size()) + " entries, expected " + std::to_string(size));
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void parse_grid(const YAML::Node& g, GridParams<double>& grid) {
  check_keys(g, "grid", {"n_nodes", "inertia", "kp", "ki", "t_li", "coupling"});
  read(g, "grid", "n_nodes", grid.n_nodes);
  if (grid.n_nodes < 1) fail(g["n_nodes"], "grid.n_nodes", "must be positive");
  const int n = grid.n_nodes;
  auto vec = [&](const char* key, Vec& out) {
    if (g[key]) out = broadcast(g[key], std::string("grid.") + key, n);
  };
  vec("inertia", grid.inertia);
  vec("kp", grid.kp);
  vec("ki", grid.ki);
  vec("t_li", grid.t_li);
  if (const YAML::Node c = g["coupling"]) {
    if (c.IsScalar()) {
      grid.coupling = Mat::Constant(n, n, read_list(c, "grid.coupling")[0]);
      grid.coupling.diagonal().setZero();
    } else {
      if (!c.IsSequence() || static_cast<int>(c.size()) != n) fail(c, "grid.coupling", "expected n_nodes rows");
      grid.coupling.resize(n, n);
      for (int j = 0; j < n; ++j) grid.coupling.row(j) = broadcast(c[j], "grid.coupling", n).transpose();
    }
  }
  try {
    validate(grid);
  } catch (const ConfigError& e) {
    fail(g, "grid", e.what());
  }
}

void parse_demand(const YAML::Node& d, DemandConfig& dc) {
  check_keys(d, "demand",
             {"kind", "seed", "amplitudes", "amplitude_range", "fluctuation", "fluctuation_levels", "fluctuation_kind", "repeat_daily",
              "steps", "profiles", "norm_power", "noise_fraction", "data_dir", "first_weekday"});
  read(d, "demand", "kind", dc.kind);
  if (dc.kind != "synthetic" && dc.kind != "profiles") fail(d["kind"], "demand.kind", "expected synthetic or profiles");
  read(d, "demand", "seed", dc.seed);
  if (d["amplitudes"]) dc.amplitudes = read_list(d["amplitudes"], "demand.amplitudes");
  if (const YAML::Node r = d["amplitude_range"]) {
    const auto v = read_list(r, "demand.amplitude_range");
    if (v.size() != 2 || v[0] > v[1] || v[0] < 0) fail(r, "demand.amplitude_range", "expected [lo, hi] with 0 <= lo <= hi");
    dc.amplitude_min = v[0];
    dc.amplitude_max = v[1];
  }
  if (d["fluctuation"]) dc.fluctuation = read_list(d["fluctuation"], "demand.fluctuation");
  if (d["fluctuation_levels"]) dc.fluctuation_levels = read_list(d["fluctuation_levels"], "demand.fluctuation_levels");
  for (double f : dc.fluctuation_levels)
    if (f < 0) fail(d["fluctuation_levels"], "demand.fluctuation_levels", "must be nonnegative");
  read(d, "demand", "fluctuation_kind", dc.fluctuation_kind);
  if (dc.fluctuation_kind != "gaussian" && dc.fluctuation_kind != "uniform")
    fail(d["fluctuation_kind"], "demand.fluctuation_kind", "expected gaussian or uniform");
  read(d, "demand", "repeat_daily", dc.repeat_daily);
  if (const YAML::Node s = d["steps"]) {
    if (!s.IsSequence()) fail(s, "demand.steps", "expected a list of {day, multipliers}");
    dc.steps.clear();
    for (const auto& item : s) {
      check_keys(item, "demand.steps[]", {"day", "multipliers"});
      StepChange st;
      read(item, "demand.steps[]", "day", st.day);
      if (!item["multipliers"]) fail(item, "demand.steps[].multipliers", "missing");
      const auto m = read_list(item["multipliers"], "demand.steps[].multipliers");
      st.multipliers = Eigen::Map<const Vec>(m.data(), static_cast<Eigen::Index>(m.size()));
      dc.steps.push_back(st);
    }
  }
  read(d, "demand", "profiles", dc.profiles);
  for (const auto& p : dc.profiles) {
    try {
      parse_profile_kind(p);
    } catch (const ConfigError& e) {
      fail(d["profiles"], "demand.profiles", e.what());
    }
  }
  read(d, "demand", "norm_power", dc.norm_power);
  read(d, "demand", "noise_fraction", dc.noise_fraction);
  if (dc.noise_fraction < 0 || dc.noise_fraction > 0.1)
    fail(d["noise_fraction"], "demand.noise_fraction", "must lie in [0, 0.1]");
  read(d, "demand", "data_dir", dc.data_dir);
  read(d, "demand", "first_weekday", dc.first_weekday);
}

void parse_ilc(const YAML::Node& i, IlcConfig& ic) {
  check_keys(i, "ilc", {"kappa", "q_order", "q_cutoff", "samples_per_hour", "kappa_set"});
  read(i, "ilc", "kappa", ic.kappa);
  read(i, "ilc", "q_order", ic.q_order);
  read(i, "ilc", "q_cutoff", ic.q_cutoff);
  read(i, "ilc", "samples_per_hour", ic.samples_per_hour);
  if (i["kappa_set"]) ic.kappa_set = read_list(i["kappa_set"], "ilc.kappa_set");
  if (ic.q_order < 1 || ic.q_order > 6) fail(i["q_order"], "ilc.q_order", "must lie in 1..6");
  if (!(ic.q_cutoff > 0 && ic.q_cutoff < 1)) fail(i["q_cutoff"], "ilc.q_cutoff", "must lie in (0, 1)");
  if (ic.samples_per_hour < 1) fail(i["samples_per_hour"], "ilc.samples_per_hour", "must be >= 1");
}

void parse_design(const YAML::Node& d, DesignConfig& dc) {
  check_keys(d, "design", {"kappa_min", "kappa_max", "points", "hour_length"});
  read(d, "design", "kappa_min", dc.kappa_min);
  read(d, "design", "kappa_max", dc.kappa_max);
  read(d, "design", "points", dc.points);
  read(d, "design", "hour_length", dc.hour_length);
  if (dc.points < 1) fail(d["points"], "design.points", "must be >= 1");
  if (!(dc.hour_length > 0)) fail(d["hour_length"], "design.hour_length", "must be positive");
  if (dc.kappa_max < dc.kappa_min) fail(d, "design", "kappa_max < kappa_min");
}

void parse_run(const YAML::Node& r, RunConfig& rc) {
  check_keys(r, "run", {"n_cycles", "time_compression", "rel_tol", "abs_tol", "out_dir"});
  read(r, "run", "n_cycles", rc.n_cycles);
  read(r, "run", "time_compression", rc.time_compression);
  read(r, "run", "rel_tol", rc.rel_tol);
  read(r, "run", "abs_tol", rc.abs_tol);
  read(r, "run", "out_dir", rc.out_dir);
  if (rc.n_cycles < 0) fail(r["n_cycles"], "run.n_cycles", "must be >= 0");
  if (!(rc.time_compression > 0)) fail(r["time_compression"], "run.time_compression", "must be positive");
  if (!(rc.rel_tol > 0) || !(rc.abs_tol > 0)) fail(r, "run", "tolerances must be positive");
}

}  // namespace

ScenarioConfig parse_config(const std::string& yaml_text, ScenarioConfig cfg) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("config line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root || root.IsNull()) return cfg;
  check_keys(root, "config", {"grid", "demand", "ilc", "design", "run"});
  if (root["grid"]) parse_grid(root["grid"], cfg.grid);
  if (root["demand"]) parse_demand(root["demand"], cfg.demand);
  if (root["ilc"]) parse_ilc(root["ilc"], cfg.ilc);
  if (root["design"]) parse_design(root["design"], cfg.design);
  if (root["run"]) parse_run(root["run"], cfg.run);
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path, ScenarioConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string dump_config(const ScenarioConfig& cfg) {
  // Shortest round-trip representation of every number.
  auto num = [](double x) { return fmt::format("{}", x); };
  auto list = [&](const std::vector<double>& v) {
    std::vector<std::string> s;
    for (double x : v) s.push_back(num(x));
    return s;
  };
  auto vec = [&](const Vec& v) { return list(std::vector<double>(v.data(), v.data() + v.size())); };
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n_nodes" << YAML::Value << cfg.grid.n_nodes;
  out << YAML::Key << "inertia" << YAML::Value << YAML::Flow << vec(cfg.grid.inertia);
  out << YAML::Key << "kp" << YAML::Value << YAML::Flow << vec(cfg.grid.kp);
  out << YAML::Key << "ki" << YAML::Value << YAML::Flow << vec(cfg.grid.ki);
  out << YAML::Key << "t_li" << YAML::Value << YAML::Flow << vec(cfg.grid.t_li);
  out << YAML::Key << "coupling" << YAML::Value << YAML::BeginSeq;
  for (int j = 0; j < cfg.grid.n_nodes; ++j) out << YAML::Flow << vec(cfg.grid.coupling.row(j).transpose());
  out << YAML::EndSeq << YAML::EndMap;

  const DemandConfig& d = cfg.demand;
  out << YAML::Key << "demand" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << d.kind;
  out << YAML::Key << "seed" << YAML::Value << d.seed;
  if (!d.amplitudes.empty()) out << YAML::Key << "amplitudes" << YAML::Value << YAML::Flow << list(d.amplitudes);
  out << YAML::Key << "amplitude_range" << YAML::Value << YAML::Flow
      << list({d.amplitude_min, d.amplitude_max});
  out << YAML::Key << "fluctuation" << YAML::Value << YAML::Flow << list(d.fluctuation);
  if (!d.fluctuation_levels.empty())
    out << YAML::Key << "fluctuation_levels" << YAML::Value << YAML::Flow << list(d.fluctuation_levels);
  out << YAML::Key << "fluctuation_kind" << YAML::Value << d.fluctuation_kind;
  out << YAML::Key << "repeat_daily" << YAML::Value << d.repeat_daily;
  out << YAML::Key << "steps" << YAML::Value << YAML::BeginSeq;
  for (const StepChange& s : d.steps)
    out << YAML::BeginMap << YAML::Key << "day" << YAML::Value << s.day << YAML::Key << "multipliers" << YAML::Value
        << YAML::Flow << vec(s.multipliers) << YAML::EndMap;
  out << YAML::EndSeq;
  out << YAML::Key << "profiles" << YAML::Value << YAML::Flow << d.profiles;
  out << YAML::Key << "norm_power" << YAML::Value << num(d.norm_power);
  out << YAML::Key << "noise_fraction" << YAML::Value << num(d.noise_fraction);
  if (!d.data_dir.empty()) out << YAML::Key << "data_dir" << YAML::Value << d.data_dir;
  out << YAML::Key << "first_weekday" << YAML::Value << d.first_weekday;
  out << YAML::EndMap;

  out << YAML::Key << "ilc" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kappa" << YAML::Value << num(cfg.ilc.kappa);
  out << YAML::Key << "q_order" << YAML::Value << cfg.ilc.q_order;
  out << YAML::Key << "q_cutoff" << YAML::Value << num(cfg.ilc.q_cutoff);
  out << YAML::Key << "samples_per_hour" << YAML::Value << cfg.ilc.samples_per_hour;
  out << YAML::Key << "kappa_set" << YAML::Value << YAML::Flow << list(cfg.ilc.kappa_set);
  out << YAML::EndMap;

  out << YAML::Key << "design" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kappa_min" << YAML::Value << num(cfg.design.kappa_min);
  out << YAML::Key << "kappa_max" << YAML::Value << num(cfg.design.kappa_max);
  out << YAML::Key << "points" << YAML::Value << cfg.design.points;
  out << YAML::Key << "hour_length" << YAML::Value << num(cfg.design.hour_length);
  out << YAML::EndMap;

  out << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n_cycles" << YAML::Value << cfg.run.n_cycles;
  out << YAML::Key << "time_compression" << YAML::Value << num(cfg.run.time_compression);
  out << YAML::Key << "rel_tol" << YAML::Value << num(cfg.run.rel_tol);
  out << YAML::Key << "abs_tol" << YAML::Value << num(cfg.run.abs_tol);
  out << YAML::Key << "out_dir" << YAML::Value << cfg.run.out_dir;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace gridilc
