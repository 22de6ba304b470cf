#ifndef GRIDILC_SRC_HOUR_INTEGRATOR_HPP
#define GRIDILC_SRC_HOUR_INTEGRATOR_HPP

// Stiff integration of the closed loop across one piece of constant ILC input
// and linear demand. Kept in its own translation unit: the odeint/ublas
// version in use does not build as C++20, so this file is compiled as C++17
// and exposes Eigen types only.

#include "gridilc/grid_model.hpp"

#include <memory>

namespace gridilc::detail {

struct DemandRamp {
  Vec u;      // ILC input held over the piece
  Vec d0;     // demand at t0
  Vec slope;  // demand slope
  double t0 = 0;
  double t1 = 0;
};

class HourIntegrator {
public:
  /// `laplacian` non-null selects the DC (linearized) power flow.
  HourIntegrator(const GridParams<double>& params, const Mat* laplacian, double abs_tol, double rel_tol,
                 double initial_step);
  ~HourIntegrator();

  /// Advances the augmented state [phi, omega, chi, E] (E' = u^LI) from
  /// ramp.t0 to ramp.t1, updating max_abs_omega after every accepted step.
  /// Throws NumericalError on step-size underflow or a non-finite state.
  void advance(Vec& x, const DemandRamp& ramp, Vec& max_abs_omega);

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gridilc::detail

#endif  // GRIDILC_SRC_HOUR_INTEGRATOR_HPP
