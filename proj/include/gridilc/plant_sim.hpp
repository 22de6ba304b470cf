#ifndef GRIDILC_PLANT_SIM_HPP
#define GRIDILC_PLANT_SIM_HPP

#include "gridilc/demand.hpp"
#include "gridilc/grid_model.hpp"
#include "gridilc/ilc.hpp"
#include "gridilc/types.hpp"

#include <functional>
#include <vector>

namespace gridilc {

struct PlantState {
  Vec phi;    // [rad]
  Vec omega;  // [rad/s]
  Vec chi;    // [W]
  double t = 0;

  /// Synchronous origin: equal phases, zero frequency, zero controller state.
  static PlantState origin(int n_nodes, double t = 0);
  Vec stacked() const;
};

/// F_j = sum_k K_jk sin(phi_j - phi_k).
Vec power_flow(const Vec& phi, const Mat& coupling);

/// Stacked derivative [phi'; omega'; chi'] of the swing equation under the
/// leaky-integrator controller u^LI = -k_P omega + chi.
Vec rhs(const PlantState& x, const Vec& u_ilc, const Vec& demand, const GridParams<double>& params);

/// Cycle geometry; time_compression scales hour and day together.
struct CycleTiming {
  double hour_length = 3600.0;

  double period() const { return kHoursPerCycle * hour_length; }
  static CycleTiming compressed(double factor) { return {3600.0 * factor}; }
};

struct SolverConfig {
  double rel_tol = 1e-6;
  double abs_tol = 1e-8;
  // Replace sin(phi_j - phi_k) by phi_j - phi_k (DC approximation).
  bool linearized = false;
};

struct CycleResult {
  int cycle = 0;
  Mat y;             // 24 x N hourly low-level energy [W h]
  Mat u;             // 24 x N applied ILC input [W]
  Mat max_abs_freq;  // 24 x N max |omega_j| over the hour [rad/s]
  Mat demand_mean;   // 24 x N hour-averaged demand [W]
  PlantState terminal;
};

/// Integrates one cycle [c T_d, (c+1) T_d) with the plan's hourly inputs held
/// constant. Throws NumericalError if the step size underflows.
CycleResult simulate_cycle(const PlantState& state0, const CyclePlan<double>& plan, const DemandTrace& trace,
                           const GridParams<double>& params, const CycleTiming& timing,
                           const SolverConfig& solver = {});

/// Supplies the plan for cycle c given all results of cycles < c.
using CycleController = std::function<CyclePlan<double>(int cycle, const std::vector<CycleResult>& history)>;

/// Chains cycles continuously: the terminal state of cycle c starts cycle c+1.
std::vector<CycleResult> run_multi_cycle(const PlantState& state0, const CycleController& controller,
                                         const DemandTrace& trace, const GridParams<double>& params,
                                         const CycleTiming& timing, int n_cycles, const SolverConfig& solver = {});

/// Controller that applies the learning law to each finished cycle.
CycleController ilc_controller(IlcState<double>& state);

/// Controller that always applies zero input.
CycleController zero_controller(int n_nodes);

}  // namespace gridilc

#endif  // GRIDILC_PLANT_SIM_HPP
