// gridilc: design sweeps, scenario simulations and matrix export.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.

#include "gridilc/scenario.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

// Accepts "0.5" as well as "1/60".
double parse_ratio(const std::string& s) {
  std::size_t used = 0;
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      const double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } else {
      const double num = std::stod(s.substr(0, slash), &used);
      if (used == slash) {
        const std::string den_s = s.substr(slash + 1);
        const double den = std::stod(den_s, &used);
        if (used == den_s.size() && den != 0) return num / den;
      }
    }
  } catch (const std::exception&) {
  }
  throw gridilc::ConfigError("--compress: cannot parse '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical microgrid control: lifted ILC design and simulation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> kappa;
  std::optional<int> cycles;
  std::string compress;
  bool verbose = false;

  app.add_option("--config", config_path, "YAML configuration file")->check(CLI::ExistingFile);
  app.add_option("--out-dir", out_dir, "output directory (default: run.out_dir)");
  app.add_option("--seed", seed, "demand RNG seed");
  app.add_option("--kappa", kappa, "learning gain [1/h]");
  app.add_option("--cycles", cycles, "number of simulated cycles (days)");
  app.add_option("--compress", compress, "time compression factor, e.g. 1/60");
  app.add_flag("-v,--verbose", verbose, "debug logging");

  auto* design = app.add_subcommand("design", "kappa sweep of the convergence certificates");
  auto* simulate = app.add_subcommand("simulate", "run a validation scenario");
  std::string scenario_name;
  simulate->add_option("scenario", scenario_name, "step_convergence | kappa_study | load_profiles")->required();
  auto* export_cmd = app.add_subcommand("export-matrices", "write A, B, E, C~, P, z and Q as CSV");
  for (auto* sub : {design, simulate, export_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    gridilc::ScenarioConfig cfg;
    std::optional<gridilc::Scenario> scenario;
    if (simulate->parsed()) {
      scenario = gridilc::parse_scenario(scenario_name);
      gridilc::apply_preset(cfg, *scenario);
    }
    if (!config_path.empty()) cfg = gridilc::load_config(config_path, cfg);
    if (seed) cfg.demand.seed = *seed;
    if (kappa) cfg.ilc.kappa = *kappa;
    if (cycles) {
      if (*cycles < 0) throw gridilc::ConfigError("--cycles must be >= 0");
      cfg.run.n_cycles = *cycles;
    }
    if (!compress.empty()) {
      cfg.run.time_compression = parse_ratio(compress);
      if (!(cfg.run.time_compression > 0)) throw gridilc::ConfigError("--compress must be positive");
    }
    if (!out_dir.empty()) cfg.run.out_dir = out_dir;
    const std::filesystem::path out = cfg.run.out_dir;

    if (design->parsed()) {
      const auto report = gridilc::run_design(cfg, out);
      spdlog::info("argmin kappa = {:.4g} 1/h, min rho = {:.4g}", report.argmin_kappa, report.min_rho);
      if (const auto w = report.mc_window())
        spdlog::info("monotonic convergence for kappa in [{:.4g}, {:.4g}] 1/h", w->first, w->second);
      else
        spdlog::info("no monotonic-convergence window on the grid");
    } else if (export_cmd->parsed()) {
      gridilc::export_matrices(cfg, out);
    } else {
      const auto result = gridilc::run_scenario(cfg, *scenario, out);
      for (const auto& run : result.runs) {
        if (run.cycles.empty()) continue;
        spdlog::info("kappa {:g}: error norm {:.4g} -> {:.4g}, max |f| = {:.3g} Hz", run.kappa,
                     run.norms.norm.front(), run.norms.norm.back(), run.max_abs_freq_hz);
      }
    }
    spdlog::info("outputs written to {}", out.string());
  } catch (const gridilc::ConfigError& e) {
    spdlog::error("configuration error: {}", e.what());
    return kExitConfig;
  } catch (const gridilc::NumericalError& e) {
    spdlog::error("numerical failure: {}", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  }
  return EXIT_SUCCESS;
}
