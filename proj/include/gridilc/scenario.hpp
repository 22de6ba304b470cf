#ifndef GRIDILC_SCENARIO_HPP
#define GRIDILC_SCENARIO_HPP

#include "gridilc/analysis.hpp"
#include "gridilc/demand.hpp"
#include "gridilc/grid_model.hpp"
#include "gridilc/plant_sim.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gridilc {

enum class Scenario { kStepConvergence, kKappaStudy, kLoadProfiles };

Scenario parse_scenario(const std::string& s);
std::string to_string(Scenario s);

struct DemandConfig {
  std::string kind = "synthetic";  // synthetic | profiles
  std::uint64_t seed = 1;

  // synthetic: explicit amplitudes, or U(amplitude_min, amplitude_max) draws
  std::vector<double> amplitudes;
  double amplitude_min = 0.0;
  double amplitude_max = 1.0;
  std::vector<double> fluctuation = {0.2};  // one value broadcasts to all nodes
  // kappa_study only: one full kappa sweep per level (overrides `fluctuation`).
  std::vector<double> fluctuation_levels;
  std::string fluctuation_kind = "gaussian";  // gaussian | uniform
  bool repeat_daily = false;
  std::vector<StepChange> steps;

  // profiles
  std::vector<std::string> profiles = {"H0", "G1", "G4", "mixed"};
  double norm_power = 100.0;
  double noise_fraction = 0.1;
  std::string data_dir;  // empty: bundled data/
  int first_weekday = 0;  // 0 = Monday
};

struct IlcConfig {
  double kappa = 1.0;                             // [1/h]
  int q_order = 1;
  double q_cutoff = 1.0 / 3.0;                    // fraction of Nyquist
  int samples_per_hour = 435;
  std::vector<double> kappa_set = {0.0, 0.5, 1.0, 2.0};
};

struct DesignConfig {
  double kappa_min = 0.0;
  double kappa_max = 2.0;
  int points = 401;
  double hour_length = 1.0;  // [s] of plant time per lifted hour
};

struct RunConfig {
  int n_cycles = 10;
  double time_compression = 1.0;
  double rel_tol = 1e-6;
  double abs_tol = 1e-8;
  std::string out_dir = "out";
};

/// Fully defaulted experiment description; an empty config file reproduces
/// the reference four-node grid with the synthetic daily demand.
struct ScenarioConfig {
  GridParams<double> grid = reference_grid();
  DemandConfig demand;
  IlcConfig ilc;
  DesignConfig design;
  RunConfig run;
};

/// Scenario presets applied before the user's overrides.
void apply_preset(ScenarioConfig& cfg, Scenario s);

/// Parses the YAML config text on top of `base`. Throws ConfigError with the
/// offending line and field.
ScenarioConfig parse_config(const std::string& yaml_text, ScenarioConfig base = {});
ScenarioConfig load_config(const std::filesystem::path& path, ScenarioConfig base = {});

/// Resolved configuration as YAML (used for the run manifest).
std::string dump_config(const ScenarioConfig& cfg);

/// Lifted P for the configured design hour and the configured Q.
LiftedSystem<double> design_lifted(const ScenarioConfig& cfg);
Mat design_q_hour(const ScenarioConfig& cfg);
std::vector<double> design_grid(const ScenarioConfig& cfg);

/// Runs the kappa sweep and writes design.csv into `out_dir` (if non-empty).
ConvergenceReport<double> run_design(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

/// Writes A, B, E, C~, P, z and Q as CSV files.
void export_matrices(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

/// The demand trace a configuration describes, covering `days` cycles.
DemandTrace build_demand(const ScenarioConfig& cfg, int days);

struct ScenarioRun {
  double kappa = 0;
  std::vector<double> fluctuation;  // as simulated
  std::vector<CycleResult> cycles;
  ErrorNorms norms;
  std::vector<double> sum_demand;  // per cycle, node-summed hour-averaged
  std::vector<double> sum_y;
  std::vector<double> sum_u;
  double max_abs_freq_hz = 0;
  int sensibility_warnings = 0;
};

struct ScenarioResult {
  Scenario scenario;
  std::vector<ScenarioRun> runs;  // one per (level, kappa) for kappa_study, else a single run
};

/// Runs the scenario and, if `out_dir` is non-empty, writes its CSVs and a
/// manifest there.
ScenarioResult run_scenario(const ScenarioConfig& cfg, Scenario scenario, const std::filesystem::path& out_dir);

/// One simulation run with the given learning gain.
ScenarioRun simulate_run(const ScenarioConfig& cfg, double kappa);

}  // namespace gridilc

#endif  // GRIDILC_SCENARIO_HPP
