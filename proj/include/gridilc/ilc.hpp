#ifndef GRIDILC_ILC_HPP
#define GRIDILC_ILC_HPP

#include "gridilc/lifted.hpp"
#include "gridilc/types.hpp"

#include <vector>

namespace gridilc {

/// One day of hourly ILC infeed: row h holds u^{c,h} for all nodes.
template <typename Scalar>
struct CyclePlan {
  int cycle = 0;
  MatX<Scalar> inputs;  // 24 x N [W]

  VecX<Scalar> stacked() const {
    const MatX<Scalar> t = inputs.transpose();
    return Eigen::Map<const VecX<Scalar>>(t.data(), t.size());
  }
};

/// Hour-major, node-minor stacked vector -> 24 x N matrix.
template <typename Scalar>
MatX<Scalar> unstack_hours(const VecX<Scalar>& v, int n_nodes) {
  if (v.size() != kHoursPerCycle * n_nodes) throw ConfigError("unstack_hours: dimension mismatch");
  return Eigen::Map<const MatX<Scalar>>(v.data(), n_nodes, kHoursPerCycle).transpose();
}

template <typename Scalar>
VecX<Scalar> stack_hours(const MatX<Scalar>& m) {
  const MatX<Scalar> t = m.transpose();
  return Eigen::Map<const VecX<Scalar>>(t.data(), t.size());
}

template <typename Scalar>
struct IlcState {
  int cycle = 0;
  VecX<Scalar> u;  // u^c, stacked
  LiftedFilters<Scalar> filters;
  std::vector<Scalar> error_norms;  // ||e^c||_2 for every consumed cycle

  int n_nodes() const { return static_cast<int>(u.size() / kHoursPerCycle); }

  CyclePlan<Scalar> plan() const { return {cycle, unstack_hours(u, n_nodes())}; }
};

/// Initial learning state: u^0 = 0.
template <typename Scalar>
IlcState<Scalar> make_ilc_state(const LiftedFilters<Scalar>& filters) {
  IlcState<Scalar> s;
  s.filters = filters;
  s.u = VecX<Scalar>::Zero(filters.q.rows());
  return s;
}

/// u^c = Q (u^{c-1} - L y^{c-1}) with e^{c-1} = -y^{c-1}.
///
/// `y_prev` is the stacked hourly low-level energy of the previous cycle in
/// W h. Advances the state and returns the new plan.
template <typename Scalar>
CyclePlan<Scalar> learning_update(IlcState<Scalar>& state, const VecX<Scalar>& y_prev) {
  if (y_prev.size() != state.u.size()) throw ConfigError("learning_update: dimension mismatch");
  state.error_norms.push_back(y_prev.norm());
  state.u = state.filters.q * (state.u - state.filters.l * y_prev);
  ++state.cycle;
  return state.plan();
}

/// Hours ahead of the next cycle at which its inputs are fully determined:
/// 24 minus the upper bandwidth of Q_h.
template <typename Scalar>
int scheduling_horizon(const LiftedFilters<Scalar>& filters, Scalar rel_tol = Scalar(1e-3)) {
  return kHoursPerCycle - upper_bandwidth(filters.q_hour, rel_tol);
}

/// Number of hours where |sum_j u_j - d_j| > |sum_j d_j|, i.e. where the
/// infeed overshoots the demand it is meant to offset.
template <typename Scalar>
int sensibility_violations(const MatX<Scalar>& inputs, const MatX<Scalar>& hourly_demand) {
  int count = 0;
  for (Eigen::Index h = 0; h < inputs.rows(); ++h) {
    const Scalar mismatch = std::abs((inputs.row(h) - hourly_demand.row(h)).sum());
    if (mismatch > std::abs(hourly_demand.row(h).sum())) ++count;
  }
  return count;
}

}  // namespace gridilc

#endif  // GRIDILC_ILC_HPP
