#include "gridilc/plant_sim.hpp"

#include "hour_integrator.hpp"

#include <algorithm>
#include <cmath>

namespace gridilc {

PlantState PlantState::origin(int n_nodes, double t) {
  return {Vec::Zero(n_nodes), Vec::Zero(n_nodes), Vec::Zero(n_nodes), t};
}

Vec PlantState::stacked() const {
  Vec x(3 * phi.size());
  x << phi, omega, chi;
  return x;
}

Vec power_flow(const Vec& phi, const Mat& coupling) {
  const Eigen::Index n = phi.size();
  Vec f = Vec::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      if (coupling(j, k) != 0.0) f[j] += coupling(j, k) * std::sin(phi[j] - phi[k]);
  return f;
}

Vec rhs(const PlantState& x, const Vec& u_ilc, const Vec& demand, const GridParams<double>& params) {
  const int n = params.n_nodes;
  if (x.phi.size() != n || x.omega.size() != n || x.chi.size() != n || u_ilc.size() != n || demand.size() != n)
    throw ConfigError("rhs: dimension mismatch");
  const Vec u_li = -params.kp.cwiseProduct(x.omega) + x.chi;
  Vec dx(3 * n);
  dx.segment(0, n) = x.omega;
  dx.segment(n, n) = (u_li + u_ilc - power_flow(x.phi, params.coupling) - demand).cwiseQuotient(params.inertia);
  dx.segment(2 * n, n) = (-x.omega - params.ki.cwiseProduct(x.chi)).cwiseQuotient(params.t_li);
  return dx;
}

CycleResult simulate_cycle(const PlantState& state0, const CyclePlan<double>& plan, const DemandTrace& trace,
                           const GridParams<double>& params, const CycleTiming& timing,
                           const SolverConfig& solver) {
  validate(params);
  const int n = params.n_nodes;
  if (plan.inputs.rows() != kHoursPerCycle || plan.inputs.cols() != n)
    throw ConfigError("simulate_cycle: plan must hold 24 hourly input vectors");
  if (trace.n_nodes() != n) throw ConfigError("simulate_cycle: demand trace has wrong node count");
  if (!plan.inputs.allFinite()) throw ConfigError("simulate_cycle: non-finite plan");
  if (state0.phi.size() != n || state0.omega.size() != n || state0.chi.size() != n)
    throw ConfigError("simulate_cycle: initial state has wrong dimension");

  const double hour = timing.hour_length;
  const double t_start = plan.cycle * timing.period();
  if (trace.horizon() < t_start + timing.period() * (1 - 1e-12))
    throw ConfigError("simulate_cycle: demand trace does not cover cycle " + std::to_string(plan.cycle));

  const Mat laplacian = solver.linearized ? build_laplacian(params) : Mat();

  Vec x(4 * n);
  x << state0.phi, state0.omega, state0.chi, Vec::Zero(n);

  CycleResult res;
  res.cycle = plan.cycle;
  res.u = plan.inputs;
  res.y = Mat::Zero(kHoursPerCycle, n);
  res.max_abs_freq = Mat::Zero(kHoursPerCycle, n);
  res.demand_mean = Mat::Zero(kHoursPerCycle, n);

  detail::HourIntegrator integrator(params, solver.linearized ? &laplacian : nullptr, solver.abs_tol,
                                    solver.rel_tol, std::min(1e-3, hour / 10));

  for (int h = 0; h < kHoursPerCycle; ++h) {
    const double ta = t_start + h * hour;
    const double tb = ta + hour;
    x.tail(n).setZero();
    Vec max_abs = x.segment(n, n).cwiseAbs();
    res.demand_mean.row(h) = trace.mean(ta, tb).transpose();

    std::vector<double> cuts = trace.breakpoints(ta, tb);
    cuts.push_back(tb);
    double s0 = ta;
    for (double s1 : cuts) {
      const Vec d0 = trace(s0);
      const detail::DemandRamp ramp{plan.inputs.row(h).transpose(), d0, (trace(s1) - d0) / (s1 - s0), s0, s1};
      try {
        integrator.advance(x, ramp, max_abs);
      } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " (cycle " + std::to_string(plan.cycle) + ", hour " +
                             std::to_string(h + 1) + ")");
      }
      s0 = s1;
    }
    res.max_abs_freq.row(h) = max_abs.transpose();
    res.y.row(h) = x.tail(n).transpose() / hour;
  }

  res.terminal.phi = x.segment(0, n);
  res.terminal.omega = x.segment(n, n);
  res.terminal.chi = x.segment(2 * n, n);
  res.terminal.t = t_start + timing.period();
  return res;
}

std::vector<CycleResult> run_multi_cycle(const PlantState& state0, const CycleController& controller,
                                         const DemandTrace& trace, const GridParams<double>& params,
                                         const CycleTiming& timing, int n_cycles, const SolverConfig& solver) {
  std::vector<CycleResult> results;
  results.reserve(std::max(0, n_cycles));
  PlantState state = state0;
  for (int c = 0; c < n_cycles; ++c) {
    CyclePlan<double> plan = controller(c, results);
    plan.cycle = c;
    results.push_back(simulate_cycle(state, plan, trace, params, timing, solver));
    state = results.back().terminal;
  }
  return results;
}

CycleController ilc_controller(IlcState<double>& state) {
  return [&state](int cycle, const std::vector<CycleResult>& history) {
    if (cycle > 0) learning_update(state, stack_hours<double>(history.back().y));
    CyclePlan<double> plan = state.plan();
    plan.cycle = cycle;
    return plan;
  };
}

CycleController zero_controller(int n_nodes) {
  return [n_nodes](int cycle, const std::vector<CycleResult>&) {
    return CyclePlan<double>{cycle, Mat::Zero(kHoursPerCycle, n_nodes)};
  };
}

}  // namespace gridilc
