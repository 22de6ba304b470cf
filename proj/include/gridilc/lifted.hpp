#ifndef GRIDILC_LIFTED_HPP
#define GRIDILC_LIFTED_HPP

#include "gridilc/butterworth.hpp"
#include "gridilc/grid_model.hpp"
#include "gridilc/types.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <vector>

namespace gridilc {

/// Exact zero-order-hold discretization of x' = A x + B u over one sample
/// step, plus the integrated quantities needed for hourly-energy sums.
template <typename Scalar>
struct SampleDiscretization {
  Scalar step = 0;
  MatX<Scalar> a_d;  // exp(A step)
  MatX<Scalar> b_d;  // phi B
  MatX<Scalar> phi;  // int_0^step exp(A s) ds
  MatX<Scalar> psi;  // int_0^step int_0^s exp(A r) dr ds
};

/// Discretizes the compound plant with step hour_length / samples_per_hour.
///
/// All three integrals come out of one exponential of the block matrix
/// [[A, I, 0], [0, 0, I], [0, 0, 0]] * step.
template <typename Scalar>
SampleDiscretization<Scalar> hour_discretization(const MatX<Scalar>& a, const MatX<Scalar>& b,
                                                 int samples_per_hour, Scalar hour_length) {
  if (samples_per_hour < 1) throw ConfigError("samples_per_hour must be >= 1");
  if (!(hour_length > 0)) throw ConfigError("hour_length must be positive");
  const Eigen::Index n = a.rows();
  const Scalar step = hour_length / Scalar(samples_per_hour);

  MatX<Scalar> aug = MatX<Scalar>::Zero(3 * n, 3 * n);
  aug.topLeftCorner(n, n) = a * step;
  aug.block(0, n, n, n) = MatX<Scalar>::Identity(n, n) * step;
  aug.block(n, 2 * n, n, n) = MatX<Scalar>::Identity(n, n) * step;
  const MatX<Scalar> ex = aug.exp();
  if (!ex.allFinite()) throw NumericalError("matrix exponential did not converge");
  // The nilpotent corner is known exactly; a wrong one means the scaling
  // and squaring broke down (extreme step lengths).
  const MatX<Scalar> eye = MatX<Scalar>::Identity(n, n);
  if (!(ex.block(n, n, n, n) - eye).isZero(Scalar(1e-8)) ||
      !(ex.block(n, 2 * n, n, n) - eye * step).isZero(Scalar(1e-8) * step))
    throw NumericalError("matrix exponential lost accuracy (sample step " + std::to_string(double(step)) + ")");

  SampleDiscretization<Scalar> d;
  d.step = step;
  d.a_d = ex.topLeftCorner(n, n);
  d.phi = ex.block(0, n, n, n);
  d.psi = ex.block(0, 2 * n, n, n);
  d.b_d = d.phi * b;
  return d;
}

template <typename Scalar>
SampleDiscretization<Scalar> hour_discretization(const CompoundPlant<Scalar>& plant,
                                                 int samples_per_hour, Scalar hour_length) {
  return hour_discretization<Scalar>(plant.a, plant.b, samples_per_hour, hour_length);
}

/// Cycle-domain map y = P u + z of the linear compound plant.
///
/// Stacking is hour-major, node-minor. Outputs are hourly low-level energies
/// expressed in input units times hours, so P is dimensionless per hour and
/// a learning gain in 1/h acts on it directly.
template <typename Scalar>
struct LiftedSystem {
  int n_nodes = 0;
  Scalar hour_length = 0;
  int samples_per_hour = 0;
  /// markov[k] = P^{h+k, h}; markov[0] is the diagonal block.
  std::vector<MatX<Scalar>> markov;
  MatX<Scalar> p;
  VecX<Scalar> z;

  MatX<Scalar> block(int h, int h_prime) const {
    return p.block(h * n_nodes, h_prime * n_nodes, n_nodes, n_nodes);
  }
};

namespace detail {

// Hour-level propagators: exp(A Delta) and int_0^Delta exp(A s) ds, built by
// chaining the per-sample quantities.
template <typename Scalar>
std::pair<MatX<Scalar>, MatX<Scalar>> hour_propagators(const SampleDiscretization<Scalar>& d,
                                                       int samples) {
  const Eigen::Index n = d.a_d.rows();
  MatX<Scalar> power = MatX<Scalar>::Identity(n, n);
  MatX<Scalar> phi_hour = MatX<Scalar>::Zero(n, n);
  for (int i = 0; i < samples; ++i) {
    phi_hour.noalias() += power * d.phi;
    power = d.a_d * power;
  }
  return {power, phi_hour};
}

}  // namespace detail

/// Assembles the block-lower-triangular P for the compound plant.
///
/// The diagonal block is the sample-wise sum of the exact ZOH step response
/// integrals. Below the diagonal, P^{hh'} = C~ Phi exp(A Delta)^{h-h'-1} Phi B
/// with Phi = int_0^Delta exp(A s) ds, which is the full-square double
/// integral rewritten without negative-time exponentials.
template <typename Scalar>
LiftedSystem<Scalar> build_p_matrix(const CompoundPlant<Scalar>& plant, int samples_per_hour,
                                    Scalar hour_length) {
  const auto d = hour_discretization(plant, samples_per_hour, hour_length);
  const int n = plant.n_nodes();
  const Eigen::Index ns = plant.n_states();

  // Diagonal block: int_0^Delta x_step(t) dt with x_step the unit step response.
  MatX<Scalar> x = MatX<Scalar>::Zero(ns, n);
  MatX<Scalar> acc = MatX<Scalar>::Zero(ns, n);
  const MatX<Scalar> psi_b = d.psi * plant.b;
  for (int i = 0; i < samples_per_hour; ++i) {
    acc.noalias() += d.phi * x;
    acc += psi_b;
    x = d.a_d * x + d.b_d;
  }

  const auto [a_hour, phi_hour] = detail::hour_propagators(d, samples_per_hour);

  LiftedSystem<Scalar> lifted;
  lifted.n_nodes = n;
  lifted.hour_length = hour_length;
  lifted.samples_per_hour = samples_per_hour;
  lifted.markov.reserve(kHoursPerCycle);
  lifted.markov.push_back(plant.c_tilde * acc / hour_length);

  const MatX<Scalar> left = plant.c_tilde * phi_hour;
  MatX<Scalar> right = phi_hour * plant.b;
  for (int k = 1; k < kHoursPerCycle; ++k) {
    lifted.markov.push_back(left * right / hour_length);
    right = a_hour * right;
  }

  const int dim = kHoursPerCycle * n;
  lifted.p = MatX<Scalar>::Zero(dim, dim);
  for (int h = 0; h < kHoursPerCycle; ++h)
    for (int hp = 0; hp <= h; ++hp) lifted.p.block(h * n, hp * n, n, n) = lifted.markov[h - hp];
  lifted.z = VecX<Scalar>::Zero(dim);
  return lifted;
}

/// Free response z^h = int over hour h of C~ exp(A t) x0 dt, in the same
/// units as P.
template <typename Scalar>
VecX<Scalar> free_response(const CompoundPlant<Scalar>& plant, const VecX<Scalar>& x0,
                           int samples_per_hour, Scalar hour_length) {
  if (x0.size() != plant.n_states()) throw ConfigError("free_response: x0 has wrong dimension");
  if (!x0.allFinite()) throw ConfigError("free_response: x0 must be finite");
  const auto d = hour_discretization(plant, samples_per_hour, hour_length);
  const auto [a_hour, phi_hour] = detail::hour_propagators(d, samples_per_hour);
  const int n = plant.n_nodes();
  VecX<Scalar> z(kHoursPerCycle * n);
  VecX<Scalar> x = x0;
  for (int h = 0; h < kHoursPerCycle; ++h) {
    z.segment(h * n, n) = plant.c_tilde * (phi_hour * x) / hour_length;
    x = a_hour * x;
  }
  return z;
}

/// 24x24 zero-phase Butterworth smoothing matrix: column j is the
/// forward-backward filtered unit impulse at hour j. `cutoff` is a fraction
/// of Nyquist over the hourly index.
template <typename Scalar = double>
MatX<Scalar> build_q_hour(Scalar cutoff, int order) {
  const DigitalFilter<Scalar> f = butterworth_lowpass<Scalar>(order, cutoff);
  MatX<Scalar> q(kHoursPerCycle, kHoursPerCycle);
  for (int j = 0; j < kHoursPerCycle; ++j) {
    std::vector<Scalar> impulse(kHoursPerCycle, Scalar(0));
    impulse[j] = 1;
    const std::vector<Scalar> col = filtfilt(f, impulse);
    for (int i = 0; i < kHoursPerCycle; ++i) q(i, j) = std::abs(col[i]) < Scalar(1e-12) ? Scalar(0) : col[i];
  }
  return q;
}

/// Q_h (x) I_N: every node filters its own hourly sequence.
template <typename Scalar>
MatX<Scalar> kron_nodes(const MatX<Scalar>& q_hour, int n_nodes) {
  const Eigen::Index hours = q_hour.rows();
  MatX<Scalar> q = MatX<Scalar>::Zero(hours * n_nodes, hours * n_nodes);
  for (Eigen::Index h = 0; h < hours; ++h)
    for (Eigen::Index hp = 0; hp < hours; ++hp)
      if (q_hour(h, hp) != Scalar(0))
        q.block(h * n_nodes, hp * n_nodes, n_nodes, n_nodes).diagonal().setConstant(q_hour(h, hp));
  return q;
}

template <typename Scalar = double>
MatX<Scalar> build_q_filter(int n_nodes, Scalar cutoff, int order) {
  if (n_nodes < 1) throw ConfigError("build_q_filter: n_nodes must be positive");
  return kron_nodes(build_q_hour<Scalar>(cutoff, order), n_nodes);
}

/// Largest j - i with |Q(i, j)| >= rel_tol * max|Q|.
template <typename Derived>
int upper_bandwidth(const Eigen::MatrixBase<Derived>& q, typename Derived::Scalar rel_tol = 1e-3) {
  const auto threshold = rel_tol * q.cwiseAbs().maxCoeff();
  int bw = 0;
  for (Eigen::Index i = 0; i < q.rows(); ++i)
    for (Eigen::Index j = i + 1; j < q.cols(); ++j)
      if (std::abs(q(i, j)) >= threshold && threshold > 0) bw = std::max(bw, static_cast<int>(j - i));
  return bw;
}

/// Q-filter and learning matrix of the learning law u^c = Q (u^{c-1} - L y^{c-1}).
///
/// The hourly low-level energy responds with the opposite sign to the ILC
/// infeed (P^{hh} is negative definite), so the learning matrix for a
/// positive gain kappa [1/h] is L = -kappa I.
template <typename Scalar>
struct LiftedFilters {
  MatX<Scalar> q_hour;
  MatX<Scalar> q;
  MatX<Scalar> l;
  Scalar kappa = 0;
};

template <typename Scalar>
LiftedFilters<Scalar> make_filters(const MatX<Scalar>& q_hour, int n_nodes, Scalar kappa) {
  LiftedFilters<Scalar> f;
  f.q_hour = q_hour;
  f.q = kron_nodes(q_hour, n_nodes);
  f.l = MatX<Scalar>::Identity(f.q.rows(), f.q.cols()) * (-kappa);
  f.kappa = kappa;
  return f;
}

}  // namespace gridilc

#endif  // GRIDILC_LIFTED_HPP
