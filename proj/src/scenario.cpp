#include "gridilc/scenario.hpp"

#include "gridilc/csv.hpp"
#include "gridilc/ilc.hpp"
#include "gridilc/lifted.hpp"

#include "json.hpp"
#include <spdlog/spdlog.h>

#include <fmt/format.h>

#include <fstream>
#include <future>
#include <random>

#ifndef GRIDILC_VERSION
#define GRIDILC_VERSION "unknown"
#endif
#ifndef GRIDILC_DATA_DIR
#define GRIDILC_DATA_DIR "data"
#endif

namespace gridilc {

namespace fs = std::filesystem;

Scenario parse_scenario(const std::string& s) {
  if (s == "step_convergence") return Scenario::kStepConvergence;
  if (s == "kappa_study") return Scenario::kKappaStudy;
  if (s == "load_profiles") return Scenario::kLoadProfiles;
  throw ConfigError("unknown scenario '" + s + "' (expected step_convergence, kappa_study or load_profiles)");
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::kStepConvergence: return "step_convergence";
    case Scenario::kKappaStudy: return "kappa_study";
    case Scenario::kLoadProfiles: return "load_profiles";
  }
  return "?";
}

void apply_preset(ScenarioConfig& cfg, Scenario s) {
  DemandConfig& d = cfg.demand;
  switch (s) {
    case Scenario::kStepConvergence:
      cfg.run.n_cycles = 10;
      d.kind = "synthetic";
      d.fluctuation = {0.2};
      d.fluctuation_kind = "gaussian";
      // The fluctuation pattern is part of the learned daily profile here.
      d.repeat_daily = true;
      d.steps = {{3, Vec::Constant(1, 1.5)}, {7, Vec::Constant(1, 0.8)}};
      break;
    case Scenario::kKappaStudy: {
      cfg.run.n_cycles = 20;
      d.kind = "synthetic";
      d.amplitudes.clear();
      const int n = cfg.grid.n_nodes;
      for (int j = 0; j < n; ++j) d.amplitudes.push_back(n == 1 ? 0.75 : 0.6 + 0.3 * j / double(n - 1));
      d.fluctuation = {0.4};
      d.fluctuation_levels = {0.4, 0.1};
      d.fluctuation_kind = "uniform";
      d.repeat_daily = false;
      d.steps.clear();
      break;
    }
    case Scenario::kLoadProfiles:
      cfg.run.n_cycles = 35;
      d.kind = "profiles";
      break;
  }
}

namespace {

Vec broadcast(const std::vector<double>& v, int n, const char* what) {
  if (v.size() == 1) return Vec::Constant(n, v[0]);
  if (static_cast<int>(v.size()) != n)
    throw ConfigError(fmt::format("demand.{} has {} entries, expected 1 or {}", what, v.size(), n));
  return Eigen::Map<const Vec>(v.data(), n);
}

CycleTiming timing_of(const ScenarioConfig& cfg) { return CycleTiming::compressed(cfg.run.time_compression); }

void warn_topology(const ScenarioConfig& cfg) {
  if (cfg.grid.n_nodes > 1 && !is_connected(cfg.grid))
    spdlog::warn("grid is disconnected: islands are only coupled through the learning layer");
}

struct Manifest {
  std::string command;
  const ScenarioConfig& cfg;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
  std::vector<std::string> outputs = {};
};

void write_manifest(const fs::path& dir, const Manifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = "gridilc";
  j["version"] = GRIDILC_VERSION;
  j["command"] = m.command;
  j["seeds"] = {{"demand", m.cfg.demand.seed}};
  for (const auto& [k, v] : m.extra.items()) j[k] = v;
  j["outputs"] = m.outputs;
  j["config"] = dump_config(m.cfg);
  fs::create_directories(dir);
  std::ofstream(dir / "manifest.json") << j.dump(2) << "\n";
}

std::string kappa_tag(double kappa) { return fmt::format("kappa_{:g}", kappa); }

void write_run(const fs::path& dir, const ScenarioRun& run) {
  csv::write_cycles(dir / "cycles.csv", run.cycles);
  csv::write_error_norms(dir / "error_norms.csv", run.norms.norm);
  csv::write_summary(dir / "summary.csv", run.sum_demand, run.sum_y, run.sum_u);
}

}  // namespace

Mat design_q_hour(const ScenarioConfig& cfg) { return build_q_hour<double>(cfg.ilc.q_cutoff, cfg.ilc.q_order); }

LiftedSystem<double> design_lifted(const ScenarioConfig& cfg) {
  validate(cfg.grid);
  return build_p_matrix(build_compound_plant(cfg.grid), cfg.ilc.samples_per_hour, cfg.design.hour_length);
}

std::vector<double> design_grid(const ScenarioConfig& cfg) {
  return linspace(cfg.design.kappa_min, cfg.design.kappa_max, cfg.design.points);
}

ConvergenceReport<double> run_design(const ScenarioConfig& cfg, const fs::path& out_dir) {
  warn_topology(cfg);
  const auto lifted = design_lifted(cfg);
  const auto report = kappa_sweep(lifted, design_q_hour(cfg), design_grid(cfg));
  if (!out_dir.empty()) {
    csv::write_design(out_dir / "design.csv", report);
    Manifest m{"design", cfg};
    m.extra["argmin_kappa"] = report.argmin_kappa;
    m.extra["min_rho"] = report.min_rho;
    if (const auto w = report.mc_window()) m.extra["mc_window"] = {w->first, w->second};
    m.outputs = {"design.csv"};
    write_manifest(out_dir, m);
  }
  return report;
}

void export_matrices(const ScenarioConfig& cfg, const fs::path& out_dir) {
  validate(cfg.grid);
  const auto plant = build_compound_plant(cfg.grid);
  const auto lifted = design_lifted(cfg);
  const Mat q_hour = design_q_hour(cfg);
  const Vec z = free_response(plant, PlantState::origin(cfg.grid.n_nodes).stacked(), cfg.ilc.samples_per_hour,
                              cfg.design.hour_length);
  csv::write_matrix(out_dir / "A.csv", plant.a);
  csv::write_matrix(out_dir / "B.csv", plant.b);
  csv::write_matrix(out_dir / "E.csv", plant.e);
  csv::write_matrix(out_dir / "C_tilde.csv", plant.c_tilde);
  csv::write_matrix(out_dir / "P.csv", lifted.p);
  csv::write_matrix(out_dir / "z.csv", z);
  csv::write_matrix(out_dir / "Q_hour.csv", q_hour);
  csv::write_matrix(out_dir / "Q.csv", kron_nodes(q_hour, cfg.grid.n_nodes));
  Manifest m{"export-matrices", cfg};
  m.extra["scheduling_horizon"] = kHoursPerCycle - upper_bandwidth(q_hour);
  m.outputs = {"A.csv", "B.csv", "E.csv", "C_tilde.csv", "P.csv", "z.csv", "Q_hour.csv", "Q.csv"};
  write_manifest(out_dir, m);
}

DemandTrace build_demand(const ScenarioConfig& cfg, int days) {
  const int n = cfg.grid.n_nodes;
  const DemandConfig& d = cfg.demand;
  const double period = timing_of(cfg).period();
  if (d.kind == "synthetic") {
    SyntheticDemandSpec spec;
    if (d.amplitudes.empty()) {
      // H_j ~ U(lo, hi), drawn from a stream separate from the fluctuations.
      std::mt19937_64 rng(d.seed ^ 0x9e3779b97f4a7c15ULL);
      std::uniform_real_distribution<double> unif(d.amplitude_min, d.amplitude_max);
      spec.amplitudes.resize(n);
      for (int j = 0; j < n; ++j) spec.amplitudes[j] = unif(rng);
    } else {
      spec.amplitudes = broadcast(d.amplitudes, n, "amplitudes");
    }
    spec.fluctuation = broadcast(d.fluctuation, n, "fluctuation");
    spec.period = period;
    spec.rng_seed = d.seed;
    spec.kind = d.fluctuation_kind == "uniform" ? FluctuationKind::kUniform : FluctuationKind::kGaussian;
    spec.repeat_daily = d.repeat_daily;
    for (const StepChange& s : d.steps) {
      std::vector<double> m(s.multipliers.data(), s.multipliers.data() + s.multipliers.size());
      spec.step_schedule.push_back({s.day, broadcast(m, n, "steps.multipliers")});
    }
    return synthetic_trace(spec, days);
  }
  if (d.kind == "profiles") {
    LoadProfileSpec spec;
    if (d.profiles.size() != 1 && static_cast<int>(d.profiles.size()) != n)
      throw ConfigError(fmt::format("demand.profiles has {} entries, expected 1 or {}", d.profiles.size(), n));
    for (int j = 0; j < n; ++j) spec.node_profiles.push_back(parse_profile_kind(d.profiles[d.profiles.size() == 1 ? 0 : j]));
    spec.tables = load_standard_profiles(d.data_dir.empty() ? fs::path(GRIDILC_DATA_DIR) : fs::path(d.data_dir));
    spec.norm_power = d.norm_power;
    spec.noise_fraction = d.noise_fraction;
    spec.calendar = weekly_calendar(days, d.first_weekday);
    spec.period = period;
    spec.rng_seed = d.seed;
    return load_profile_trace(spec, days);
  }
  throw ConfigError("demand.kind must be synthetic or profiles");
}

ScenarioRun simulate_run(const ScenarioConfig& cfg, double kappa) {
  validate(cfg.grid);
  ScenarioRun run;
  run.kappa = kappa;
  run.fluctuation = cfg.demand.fluctuation;
  const int cycles = cfg.run.n_cycles;
  if (cycles <= 0) return run;

  const int n = cfg.grid.n_nodes;
  const DemandTrace trace = build_demand(cfg, cycles);
  IlcState<double> state = make_ilc_state(make_filters(design_q_hour(cfg), n, kappa));
  SolverConfig solver;
  solver.rel_tol = cfg.run.rel_tol;
  solver.abs_tol = cfg.run.abs_tol;
  run.cycles = run_multi_cycle(PlantState::origin(n), ilc_controller(state), trace, cfg.grid, timing_of(cfg),
                               cycles, solver);

  run.norms = error_norms(run.cycles);
  for (const CycleResult& r : run.cycles) {
    run.sum_demand.push_back(r.demand_mean.colwise().mean().sum());
    run.sum_y.push_back(r.y.colwise().mean().sum());
    run.sum_u.push_back(r.u.colwise().mean().sum());
    run.max_abs_freq_hz = std::max(run.max_abs_freq_hz, r.max_abs_freq.maxCoeff() / (2 * std::numbers::pi));
    const int v = sensibility_violations<double>(r.u, r.demand_mean);
    if (v > 0) {
      run.sensibility_warnings += v;
      spdlog::warn("kappa {:g}, cycle {}: ILC infeed overshoots the demand in {} hour(s)", kappa, r.cycle, v);
    }
  }
  return run;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, Scenario scenario, const fs::path& out_dir) {
  warn_topology(cfg);
  ScenarioResult result{scenario, {}};
  const std::string name = to_string(scenario);

  auto guarded = [&](const ScenarioConfig& c, double kappa) {
    try {
      return simulate_run(c, kappa);
    } catch (const NumericalError& e) {
      throw NumericalError(fmt::format("{} (kappa {:g}): {}", name, kappa, e.what()));
    }
  };

  const bool study = scenario == Scenario::kKappaStudy;
  std::vector<ScenarioConfig> variants;
  if (study && !cfg.demand.fluctuation_levels.empty()) {
    for (double level : cfg.demand.fluctuation_levels) {
      variants.push_back(cfg);
      variants.back().demand.fluctuation = {level};
    }
  } else {
    variants.push_back(cfg);
  }

  if (study) {
    // Runs for different gains and levels are independent.
    std::vector<std::future<ScenarioRun>> jobs;
    for (const ScenarioConfig& v : variants)
      for (double k : cfg.ilc.kappa_set) jobs.push_back(std::async(std::launch::async, guarded, std::cref(v), k));
    for (auto& j : jobs) result.runs.push_back(j.get());
  } else {
    result.runs.push_back(guarded(cfg, cfg.ilc.kappa));
  }

  if (out_dir.empty()) return result;
  fs::create_directories(out_dir);
  Manifest m{"simulate " + name, cfg};
  m.extra["scenario"] = name;
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  const bool levels = variants.size() > 1;
  auto run_prefix = [&](const ScenarioRun& run) {
    std::string p;
    if (levels) p += fmt::format("fluct_{:g}/", run.fluctuation.at(0));
    if (study) p += kappa_tag(run.kappa) + "/";
    return p;
  };
  for (const ScenarioRun& run : result.runs) {
    const std::string prefix = run_prefix(run);
    write_run(out_dir / prefix, run);
    for (const char* f : {"cycles.csv", "error_norms.csv", "summary.csv"}) m.outputs.push_back(prefix + f);
    runs.push_back({{"kappa", run.kappa},
                    {"fluctuation", run.fluctuation},
                    {"max_abs_freq_hz", run.max_abs_freq_hz},
                    {"sensibility_warnings", run.sensibility_warnings}});
  }
  if (study) {
    std::ofstream out(out_dir / "error_norms_by_kappa.csv");
    out << "fluctuation,kappa,cycle,error_norm\n";
    for (const ScenarioRun& run : result.runs)
      for (std::size_t c = 0; c < run.norms.norm.size(); ++c)
        out << fmt::format("{:g},{:g},{},{:.12g}\n", run.fluctuation.at(0), run.kappa, c, run.norms.norm[c]);
    m.outputs.push_back("error_norms_by_kappa.csv");
  }
  m.extra["runs"] = runs;
  write_manifest(out_dir, m);
  return result;
}

}  // namespace gridilc
