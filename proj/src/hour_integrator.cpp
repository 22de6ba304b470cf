#include "hour_integrator.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace gridilc::detail {

namespace odeint = boost::numeric::odeint;
using OdeState = boost::numeric::ublas::vector<double>;
using OdeMatrix = boost::numeric::ublas::matrix<double>;

namespace {

struct Segment {
  const GridParams<double>& params;
  const Mat* laplacian;
  const DemandRamp& ramp;

  void operator()(const OdeState& x, OdeState& dxdt, double t) const {
    const int n = params.n_nodes;
    for (int j = 0; j < n; ++j) {
      const double phi = x[j], omega = x[n + j], chi = x[2 * n + j];
      double flow = 0;
      for (int k = 0; k < n; ++k) {
        if (laplacian) flow += (*laplacian)(j, k) * x[k];
        else if (params.coupling(j, k) != 0.0) flow += params.coupling(j, k) * std::sin(phi - x[k]);
      }
      const double u_li = -params.kp[j] * omega + chi;
      const double demand = ramp.d0[j] + ramp.slope[j] * (t - ramp.t0);
      dxdt[j] = omega;
      dxdt[n + j] = (u_li + ramp.u[j] - flow - demand) / params.inertia[j];
      dxdt[2 * n + j] = (-omega - params.ki[j] * chi) / params.t_li[j];
      dxdt[3 * n + j] = u_li;
    }
  }
};

struct SegmentJacobian {
  const Segment& seg;

  void operator()(const OdeState& x, OdeMatrix& jac, const double& /*t*/, OdeState& dfdt) const {
    const auto& p = seg.params;
    const int n = p.n_nodes;
    jac.clear();
    dfdt.clear();
    for (int j = 0; j < n; ++j) {
      const double m = p.inertia[j];
      jac(j, n + j) = 1.0;
      for (int k = 0; k < n; ++k) {
        double dflow;
        if (seg.laplacian) {
          dflow = (*seg.laplacian)(j, k);
        } else if (k == j) {
          dflow = 0;
          for (int l = 0; l < n; ++l)
            if (l != j) dflow += p.coupling(j, l) * std::cos(x[j] - x[l]);
        } else {
          dflow = -p.coupling(j, k) * std::cos(x[j] - x[k]);
        }
        jac(n + j, k) = -dflow / m;
      }
      jac(n + j, n + j) = -p.kp[j] / m;
      jac(n + j, 2 * n + j) = 1.0 / m;
      jac(2 * n + j, n + j) = -1.0 / p.t_li[j];
      jac(2 * n + j, 2 * n + j) = -p.ki[j] / p.t_li[j];
      jac(3 * n + j, n + j) = -p.kp[j];
      jac(3 * n + j, 2 * n + j) = 1.0;
      dfdt[n + j] = -seg.ramp.slope[j] / m;
    }
  }
};

using Controller = decltype(odeint::make_controlled<odeint::rosenbrock4<double>>(1.0, 1.0));

}  // namespace

struct HourIntegrator::Impl {
  const GridParams<double>& params;
  const Mat* laplacian;
  Controller controller;
  double dt;
  OdeState x;
};

HourIntegrator::HourIntegrator(const GridParams<double>& params, const Mat* laplacian, double abs_tol,
                               double rel_tol, double initial_step)
    : impl_(new Impl{params, laplacian, odeint::make_controlled<odeint::rosenbrock4<double>>(abs_tol, rel_tol),
                     initial_step, OdeState(4 * params.n_nodes)}) {}

HourIntegrator::~HourIntegrator() = default;

void HourIntegrator::advance(Vec& state, const DemandRamp& ramp, Vec& max_abs_omega) {
  const int n = impl_->params.n_nodes;
  OdeState& x = impl_->x;
  for (int i = 0; i < 4 * n; ++i) x[i] = state[i];
  double& dt = impl_->dt;

  const Segment seg{impl_->params, impl_->laplacian, ramp};
  const SegmentJacobian jac{seg};
  auto system = std::make_pair(std::cref(seg), std::cref(jac));

  double t = ramp.t0;
  const double s1 = ramp.t1;
  while (t < s1) {
    const bool last = t + dt >= s1;
    double step = last ? s1 - t : dt;
    const double proposed = step;
    if (impl_->controller.try_step(system, x, t, step) == odeint::success) {
      // Keep the natural step size when the piece end truncated it.
      dt = (last && step >= proposed) ? std::max(dt, step) : step;
      if (last) t = s1;
      for (int j = 0; j < n; ++j) max_abs_omega[j] = std::max(max_abs_omega[j], std::abs(x[n + j]));
    } else {
      dt = step;
    }
    if (dt < 1e-12 * std::max(1.0, std::abs(t))) {
      std::ostringstream msg;
      msg << "step size underflow at t = " << t << " s";
      throw NumericalError(msg.str());
    }
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!std::isfinite(x[i])) {
        std::ostringstream msg;
        msg << "non-finite state at t = " << t << " s";
        throw NumericalError(msg.str());
      }
  }
  for (int i = 0; i < 4 * n; ++i) state[i] = x[i];
}

}  // namespace gridilc::detail
