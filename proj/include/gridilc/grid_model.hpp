#ifndef GRIDILC_GRID_MODEL_HPP
#define GRIDILC_GRID_MODEL_HPP

#include "gridilc/types.hpp"

#include <cmath>
#include <queue>
#include <vector>

namespace gridilc {

/// Per-node physical and low-level controller constants of the network.
///
/// All powers are per unit. The coupling matrix holds the maximum line power
/// flow K_jk = V_j V_k Y_jk (steady-state voltages folded in), so it is the
/// only topology input: K_jk > 0 iff nodes j and k share a line.
template <typename Scalar>
struct GridParams {
  int n_nodes = 0;
  VecX<Scalar> inertia;   // M_j [W s^2]
  VecX<Scalar> kp;        // k_P,j [W s]
  VecX<Scalar> ki;        // k_I,j [1/(W s)]
  VecX<Scalar> t_li;      // T_j [s]
  MatX<Scalar> coupling;  // K_jk [W/W], symmetric, zero diagonal
};

/// Fully connected four-node network with the reference controller tuning.
template <typename Scalar = double>
GridParams<Scalar> reference_grid() {
  GridParams<Scalar> p;
  p.n_nodes = 4;
  p.inertia.resize(4);
  p.inertia << 5.0, 4.8, 4.1, 4.8;
  p.kp.resize(4);
  p.kp << 400.0, 110.0, 100.0, 200.0;
  p.ki.resize(4);
  p.ki << 0.05, 0.004, 0.05, 0.001;
  p.t_li.resize(4);
  p.t_li << 0.04, 0.045, 0.047, 0.043;
  p.coupling = MatX<Scalar>::Constant(4, 4, Scalar(6));
  p.coupling.diagonal().setZero();
  return p;
}

/// Throws ConfigError if the parameters violate their invariants.
template <typename Scalar>
void validate(const GridParams<Scalar>& p) {
  const int n = p.n_nodes;
  if (n < 1) throw ConfigError("grid: n_nodes must be positive");
  auto check_len = [n](const VecX<Scalar>& v, const char* name) {
    if (v.size() != n)
      throw ConfigError(std::string("grid: ") + name + " has " + std::to_string(v.size()) +
                        " entries, expected " + std::to_string(n));
  };
  check_len(p.inertia, "inertia");
  check_len(p.kp, "kp");
  check_len(p.ki, "ki");
  check_len(p.t_li, "t_li");
  if (p.coupling.rows() != n || p.coupling.cols() != n)
    throw ConfigError("grid: coupling must be n_nodes x n_nodes");

  for (int j = 0; j < n; ++j) {
    if (!(p.inertia[j] > 0)) throw ConfigError("grid: inertia must be strictly positive");
    if (!(p.kp[j] > 0)) throw ConfigError("grid: kp must be strictly positive");
    if (!(p.t_li[j] > 0)) throw ConfigError("grid: t_li must be strictly positive");
    if (!(p.ki[j] >= 0)) throw ConfigError("grid: ki must be nonnegative");
  }
  for (int j = 0; j < n; ++j) {
    if (p.coupling(j, j) != Scalar(0)) throw ConfigError("grid: coupling diagonal must be zero");
    for (int k = 0; k < n; ++k) {
      if (!(p.coupling(j, k) >= 0)) throw ConfigError("grid: coupling entries must be nonnegative");
      if (p.coupling(j, k) != p.coupling(k, j)) throw ConfigError("grid: coupling must be symmetric");
    }
  }
}

/// Breadth-first reachability over K_jk > 0.
template <typename Scalar>
bool is_connected(const GridParams<Scalar>& p) {
  const int n = p.n_nodes;
  if (n <= 1) return true;
  std::vector<bool> seen(n, false);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = true;
  int reached = 1;
  while (!frontier.empty()) {
    const int j = frontier.front();
    frontier.pop();
    for (int k = 0; k < n; ++k) {
      if (!seen[k] && p.coupling(j, k) > 0) {
        seen[k] = true;
        ++reached;
        frontier.push(k);
      }
    }
  }
  return reached == n;
}

/// Weighted Laplacian L_jk = delta_jk sum_l K_jl - K_jk of the DC-approximated
/// power flow.
template <typename Scalar>
MatX<Scalar> build_laplacian(const GridParams<Scalar>& p) {
  validate(p);
  MatX<Scalar> lap = -p.coupling;
  lap.diagonal() = p.coupling.rowwise().sum();
  return lap;
}

/// Linearized compound plant x' = A x + B u + E d with state ordering
/// [phi_1..phi_N, omega_1..omega_N, chi_1..chi_N] and hourly-energy output
/// map y' = C~ x = u^LI.
template <typename Scalar>
struct CompoundPlant {
  MatX<Scalar> a;
  MatX<Scalar> b;
  MatX<Scalar> e;
  MatX<Scalar> c_tilde;

  int n_nodes() const { return static_cast<int>(b.cols()); }
  int n_states() const { return static_cast<int>(a.rows()); }
};

template <typename Scalar>
CompoundPlant<Scalar> build_compound_plant(const GridParams<Scalar>& p) {
  const MatX<Scalar> lap = build_laplacian(p);
  const int n = p.n_nodes;
  const VecX<Scalar> m_inv = p.inertia.cwiseInverse();
  const VecX<Scalar> t_inv = p.t_li.cwiseInverse();

  CompoundPlant<Scalar> plant;
  plant.a = MatX<Scalar>::Zero(3 * n, 3 * n);
  plant.a.block(0, n, n, n).setIdentity();
  plant.a.block(n, 0, n, n) = -(m_inv.asDiagonal() * lap);
  plant.a.block(n, n, n, n) = (-m_inv.cwiseProduct(p.kp)).asDiagonal();
  plant.a.block(n, 2 * n, n, n) = m_inv.asDiagonal();
  plant.a.block(2 * n, n, n, n) = (-t_inv).asDiagonal();
  plant.a.block(2 * n, 2 * n, n, n) = (-t_inv.cwiseProduct(p.ki)).asDiagonal();

  plant.b = MatX<Scalar>::Zero(3 * n, n);
  plant.b.block(n, 0, n, n) = m_inv.asDiagonal();
  plant.e = -plant.b;

  plant.c_tilde = MatX<Scalar>::Zero(n, 3 * n);
  plant.c_tilde.block(0, n, n, n) = (-p.kp).asDiagonal();
  plant.c_tilde.block(0, 2 * n, n, n).setIdentity();
  return plant;
}

}  // namespace gridilc

#endif  // GRIDILC_GRID_MODEL_HPP
