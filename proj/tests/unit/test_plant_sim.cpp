#include "gridilc/analysis.hpp"
#include "gridilc/plant_sim.hpp"

#include <doctest.h>

#include <random>

using namespace gridilc;

namespace {

const CycleTiming kMinuteHours = CycleTiming::compressed(1.0 / 60.0);

DemandTrace constant_demand(const Vec& level, int days, double period) {
  const Eigen::Index samples = days * 24 + 1;
  Mat p(samples, level.size());
  for (Eigen::Index k = 0; k < samples; ++k) p.row(k) = level.transpose();
  return DemandTrace(period / 24, p, Mat::Zero(samples, level.size()));
}

DemandTrace sine_demand(double amplitude, int n, int days, double period) {
  SyntheticDemandSpec s;
  s.amplitudes = Vec::Constant(n, amplitude);
  s.fluctuation = Vec::Zero(n);
  s.period = period;
  return synthetic_trace(s, days);
}

CyclePlan<double> zero_plan(int n) { return {0, Mat::Zero(24, n)}; }

}  // namespace

TEST_SUITE("plant_sim") {

TEST_CASE("origin with no input and no demand is an equilibrium") {
  const auto p = reference_grid();
  const Vec dx = rhs(PlantState::origin(4), Vec::Zero(4), Vec::Zero(4), p);
  CHECK(dx.isZero(0.0));
}

TEST_CASE("two-node power flow") {
  Mat k(2, 2);
  k << 0, 6, 6, 0;
  Vec phi(2);
  phi << std::numbers::pi / 2, 0;
  const Vec f = power_flow(phi, k);
  CHECK(f[0] == doctest::Approx(6.0));
  CHECK(f[1] == doctest::Approx(-6.0));
}

TEST_CASE("power flows balance for random states") {
  const auto p = reference_grid();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    Vec phi(4);
    for (int j = 0; j < 4; ++j) phi[j] = u(rng);
    CHECK(std::abs(power_flow(phi, p.coupling).sum()) < 1e-12);
  }
}

TEST_CASE("rhs rejects mismatched dimensions") {
  CHECK_THROWS_AS(rhs(PlantState::origin(3), Vec::Zero(4), Vec::Zero(4), reference_grid()), ConfigError);
}

TEST_CASE("zero demand and zero input keep the grid at rest") {
  const auto p = reference_grid();
  const auto res = simulate_cycle(PlantState::origin(4), zero_plan(4), constant_demand(Vec::Zero(4), 1, 1440),
                                  p, kMinuteHours);
  CHECK(res.y.isZero(0.0));
  CHECK(res.terminal.stacked().isZero(0.0));
  CHECK(res.terminal.t == doctest::Approx(1440.0));
}

TEST_CASE("constant demand settles to a constant hourly energy") {
  const auto p = reference_grid();
  const auto res = simulate_cycle(PlantState::origin(4), zero_plan(4),
                                  constant_demand(Vec::Constant(4, 0.8), 1, 1440), p, kMinuteHours);
  for (int j = 0; j < 4; ++j) {
    CHECK(std::abs(res.y(23, j) - res.y(22, j)) < 0.01 * std::abs(res.y(23, j)));
    CHECK(res.demand_mean(5, j) == doctest::Approx(0.8));
  }
  // Low-level control covers the demand in steady state.
  CHECK(res.y.row(23).sum() == doctest::Approx(3.2).epsilon(0.01));
  CHECK(res.max_abs_freq.maxCoeff() / (2 * std::numbers::pi) <= 0.0038);
}

TEST_CASE("a full-scale daily demand stays inside the frequency band") {
  const auto p = reference_grid();
  const auto res = simulate_cycle(PlantState::origin(4), zero_plan(4), sine_demand(1.0, 4, 1, 1440), p,
                                  kMinuteHours);
  CHECK(res.max_abs_freq.maxCoeff() / (2 * std::numbers::pi) <= 0.0038);
  CHECK(res.max_abs_freq.minCoeff() >= 0.0);
}

TEST_CASE("chained cycles equal single cycles") {
  const auto p = reference_grid();
  const auto trace = sine_demand(0.7, 4, 2, 1440);
  const auto multi = run_multi_cycle(PlantState::origin(4), zero_controller(4), trace, p, kMinuteHours, 2);
  REQUIRE(multi.size() == 2);
  const auto first = simulate_cycle(PlantState::origin(4), zero_plan(4), trace, p, kMinuteHours);
  CHECK((multi[0].y - first.y).isZero(0.0));
  CyclePlan<double> second = zero_plan(4);
  second.cycle = 1;
  const auto again = simulate_cycle(first.terminal, second, trace, p, kMinuteHours);
  CHECK((multi[1].y - again.y).isZero(0.0));
  for (const auto& r : multi) CHECK(r.u.isZero(0.0));
}

TEST_CASE("learning controller applies the update law between cycles") {
  const auto p = reference_grid();
  const auto trace = sine_demand(0.7, 4, 3, 1440);
  const auto filters = make_filters(build_q_hour(1.0 / 3.0, 1), 4, 1.0);
  auto state = make_ilc_state(filters);
  const auto runs = run_multi_cycle(PlantState::origin(4), ilc_controller(state), trace, p, kMinuteHours, 3);
  CHECK(runs[0].u.isZero(0.0));
  const Vec u1 = filters.q * (-filters.l * stack_hours<double>(runs[0].y));
  CHECK((stack_hours<double>(runs[1].u) - u1).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(state.cycle == 2);
  // Learning reduces the low-level energy after the first day.
  CHECK(runs[2].y.norm() < runs[0].y.norm());
}

TEST_CASE("halving the tolerances barely changes the outputs") {
  const auto p = reference_grid();
  const auto trace = sine_demand(0.8, 4, 1, 1440);
  const auto a = simulate_cycle(PlantState::origin(4), zero_plan(4), trace, p, kMinuteHours);
  SolverConfig tight;
  tight.rel_tol /= 2;
  tight.abs_tol /= 2;
  const auto b = simulate_cycle(PlantState::origin(4), zero_plan(4), trace, p, kMinuteHours, tight);
  CHECK((a.y - b.y).cwiseAbs().maxCoeff() < 1e-3 * b.y.cwiseAbs().maxCoeff());
}

TEST_CASE("nonlinear and linearized plants agree for small demand") {
  const auto p = reference_grid();
  const auto trace = sine_demand(0.05, 4, 1, 1440);
  const auto nl = simulate_cycle(PlantState::origin(4), zero_plan(4), trace, p, kMinuteHours);
  SolverConfig lin;
  lin.linearized = true;
  const auto li = simulate_cycle(PlantState::origin(4), zero_plan(4), trace, p, kMinuteHours, lin);
  CHECK((nl.y - li.y).cwiseAbs().maxCoeff() < 1e-4 * li.y.cwiseAbs().maxCoeff());
}

TEST_CASE("bad inputs and numerical failures are reported") {
  const auto p = reference_grid();
  const auto trace = sine_demand(0.5, 4, 1, 1440);
  CyclePlan<double> plan = zero_plan(4);
  plan.inputs(3, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(simulate_cycle(PlantState::origin(4), plan, trace, p, kMinuteHours), ConfigError);
  CHECK_THROWS_AS(simulate_cycle(PlantState::origin(3), zero_plan(4), trace, p, kMinuteHours), ConfigError);
  plan = zero_plan(4);
  plan.cycle = 1;  // beyond the one-day trace
  CHECK_THROWS_AS(simulate_cycle(PlantState::origin(4), plan, trace, p, kMinuteHours), ConfigError);

  plan = zero_plan(4);
  plan.inputs.setConstant(1e305);
  try {
    simulate_cycle(PlantState::origin(4), plan, trace, p, kMinuteHours);
    FAIL("expected a numerical failure");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("cycle 0") != std::string::npos);
  }
}

}  // TEST_SUITE
