#include "gridilc/scenario.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace gridilc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gridilc_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool same_config(const ScenarioConfig& a, const ScenarioConfig& b) { return dump_config(a) == dump_config(b); }

std::string error_of(const std::string& yaml) {
  try {
    parse_config(yaml);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("empty config reproduces the defaults") {
  const ScenarioConfig d;
  CHECK(same_config(parse_config(""), d));
  CHECK(d.grid.n_nodes == 4);
  CHECK(d.ilc.samples_per_hour == 435);
  CHECK(d.ilc.kappa == 1.0);
  CHECK(d.design.points == 401);
}

TEST_CASE("missing fields default to the explicit values") {
  const auto partial = parse_config("ilc:\n  kappa: 1.0\n");
  const auto full = parse_config(dump_config(ScenarioConfig{}));
  CHECK(same_config(partial, full));
  CHECK(same_config(partial, ScenarioConfig{}));
}

TEST_CASE("dump and parse round-trip") {
  ScenarioConfig c;
  c.ilc.kappa = 0.7312345678901234;
  c.demand.amplitudes = {0.6, 0.7, 0.8, 0.9};
  c.demand.steps.push_back({3, Vec::Constant(4, 1.5)});
  c.grid.inertia[2] = 3.3;
  c.run.time_compression = 1.0 / 60.0;
  c.demand.kind = "profiles";
  const auto back = parse_config(dump_config(c));
  CHECK(dump_config(back) == dump_config(c));
  CHECK(back.ilc.kappa == c.ilc.kappa);
  CHECK(back.run.time_compression == c.run.time_compression);
}

TEST_CASE("unknown fields are reported with their line") {
  const std::string msg = error_of("ilc:\n  kappa: 1\n  gamma: 2\n");
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("ilc.gamma") != std::string::npos);
  CHECK(error_of("nonsense: 1\n").find("unknown field") != std::string::npos);
}

TEST_CASE("invalid values are rejected") {
  CHECK_FALSE(error_of("ilc:\n  kappa: abc\n").empty());
  CHECK_FALSE(error_of("ilc:\n  q_order: 9\n").empty());
  CHECK_FALSE(error_of("ilc:\n  q_cutoff: 1.5\n").empty());
  CHECK_FALSE(error_of("demand:\n  noise_fraction: 0.3\n").empty());
  CHECK_FALSE(error_of("grid:\n  inertia: [1, 2, 3]\n").empty());
  CHECK_FALSE(error_of("grid: [\n").empty());
  CHECK_THROWS_AS(load_config("/nonexistent/config.yaml"), ConfigError);
}

TEST_CASE("scalar grid values broadcast to all nodes") {
  const auto c = parse_config("grid:\n  n_nodes: 3\n  inertia: 2\n  kp: 100\n  ki: 0.01\n  t_li: 0.05\n"
                              "  coupling: 4\n");
  CHECK(c.grid.inertia.size() == 3);
  CHECK(c.grid.coupling(0, 1) == 4.0);
  CHECK(c.grid.coupling(1, 1) == 0.0);
}

TEST_CASE("single-node design runs on a zero Laplacian") {
  const auto c = parse_config("grid:\n  n_nodes: 1\n  inertia: 5\n  kp: 400\n  ki: 0.05\n  t_li: 0.04\n"
                              "  coupling: 0\ndesign:\n  points: 21\n");
  const auto r = run_design(c, {});
  CHECK(r.kappa.size() == 21);
  CHECK(r.min_rho < 1.0);
}

TEST_CASE("zero cycles produce empty outputs") {
  ScenarioConfig c;
  apply_preset(c, Scenario::kStepConvergence);
  c.run.n_cycles = 0;
  const fs::path dir = scratch("zero");
  const auto res = run_scenario(c, Scenario::kStepConvergence, dir);
  REQUIRE(res.runs.size() == 1);
  CHECK(res.runs[0].cycles.empty());
  CHECK(slurp(dir / "error_norms.csv") == "cycle,error_norm\n");
  CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("same configuration gives byte-identical outputs and a manifest") {
  ScenarioConfig c;
  apply_preset(c, Scenario::kStepConvergence);
  c.run.n_cycles = 2;
  c.run.time_compression = 1.0 / 60.0;
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  run_scenario(c, Scenario::kStepConvergence, a);
  run_scenario(c, Scenario::kStepConvergence, b);
  for (const char* f : {"cycles.csv", "error_norms.csv", "summary.csv"}) {
    CHECK(!slurp(a / f).empty());
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(slurp(a / "summary.csv").rfind("cycle,sum_demand,sum_y,sum_u\n", 0) == 0);
  CHECK(slurp(a / "cycles.csv").rfind("cycle,hour,node,u_ilc,y_li,max_abs_freq\n", 0) == 0);
  const std::string manifest = slurp(a / "manifest.json");
  for (const char* key : {"\"version\"", "\"seeds\"", "\"config\""}) CHECK(manifest.find(key) != std::string::npos);

  ScenarioConfig other = c;
  other.demand.seed = 99;
  const fs::path d = scratch("det_c");
  run_scenario(other, Scenario::kStepConvergence, d);
  CHECK(slurp(a / "cycles.csv") != slurp(d / "cycles.csv"));
}

TEST_CASE("scenario names") {
  CHECK(parse_scenario("kappa_study") == Scenario::kKappaStudy);
  CHECK(to_string(Scenario::kLoadProfiles) == "load_profiles");
  CHECK_THROWS_AS(parse_scenario("nope"), ConfigError);
}

}  // TEST_SUITE
