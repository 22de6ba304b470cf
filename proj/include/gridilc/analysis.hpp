#ifndef GRIDILC_ANALYSIS_HPP
#define GRIDILC_ANALYSIS_HPP

#include "gridilc/lifted.hpp"
#include "gridilc/types.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

namespace gridilc {

// Certificates count as satisfied only below 1 - kCertificateMargin, so the
// unit eigenvalue of a unit-DC-gain Q is never reported as stable.
inline constexpr double kCertificateMargin = 1e-9;

template <typename Derived>
typename Derived::Scalar spectral_radius(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  Eigen::EigenSolver<MatX<Scalar>> es(m.eval(), false);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue computation failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

template <typename Derived>
typename Derived::Scalar max_singular_value(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  Eigen::JacobiSVD<MatX<Scalar>> svd(m.eval());
  return svd.singularValues()(0);
}

/// P^{-1}; throws if a diagonal block of P is singular.
template <typename Scalar>
MatX<Scalar> lifted_inverse(const LiftedSystem<Scalar>& lifted) {
  Eigen::FullPivLU<MatX<Scalar>> diag(lifted.markov.at(0));
  if (!diag.isInvertible()) throw NumericalError("diagonal block of P is singular");
  return lifted.p.partialPivLu().inverse();
}

/// rho(Q (I - P L)); the iteration is asymptotically stable iff this is < 1.
template <typename Scalar>
Scalar asymptotic_stability(const LiftedSystem<Scalar>& lifted, const LiftedFilters<Scalar>& f) {
  const Eigen::Index n = lifted.p.rows();
  return spectral_radius(f.q * (MatX<Scalar>::Identity(n, n) - lifted.p * f.l));
}

/// sigma_max(P Q P^{-1} (I - P L)); below 1 the error converges monotonically
/// in the 2-norm at this rate.
template <typename Scalar>
Scalar monotonic_convergence(const LiftedSystem<Scalar>& lifted, const LiftedFilters<Scalar>& f) {
  const Eigen::Index n = lifted.p.rows();
  const MatX<Scalar> p_inv = lifted_inverse(lifted);
  return max_singular_value(lifted.p * f.q * p_inv * (MatX<Scalar>::Identity(n, n) - lifted.p * f.l));
}

template <typename Scalar>
struct ConvergenceReport {
  std::vector<Scalar> kappa;
  std::vector<Scalar> rho;
  std::vector<Scalar> sigma_max;
  std::vector<bool> as;
  std::vector<bool> mc;
  Scalar argmin_kappa = 0;
  Scalar min_rho = 0;

  /// Smallest and largest kappa of the first contiguous MC run.
  std::optional<std::pair<Scalar, Scalar>> mc_window() const {
    std::optional<std::pair<Scalar, Scalar>> w;
    for (std::size_t i = 0; i < kappa.size(); ++i) {
      if (mc[i]) {
        if (!w) w = std::make_pair(kappa[i], kappa[i]);
        else w->second = kappa[i];
      } else if (w) {
        break;
      }
    }
    return w;
  }

  /// Rate gamma at the given grid index, if MC holds there.
  std::optional<Scalar> rate(std::size_t i) const {
    return mc.at(i) ? std::optional<Scalar>(sigma_max[i]) : std::nullopt;
  }
};

inline std::vector<double> linspace(double lo, double hi, int points) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = points == 1 ? lo : lo + (hi - lo) * double(i) / double(points - 1);
  return g;
}

/// Evaluates both certificates for every kappa with L = -kappa I.
/// Grid points are independent and are spread over `threads` workers.
template <typename Scalar>
ConvergenceReport<Scalar> kappa_sweep(const LiftedSystem<Scalar>& lifted, const MatX<Scalar>& q_hour,
                                      const std::vector<Scalar>& grid, unsigned threads = 0) {
  if (grid.empty()) throw ConfigError("kappa_sweep: empty grid");
  const int nn = lifted.n_nodes;
  const MatX<Scalar> q = kron_nodes(q_hour, nn);
  const MatX<Scalar> p_inv = lifted_inverse(lifted);
  const MatX<Scalar> pqp = lifted.p * q * p_inv;
  const Eigen::Index n = lifted.p.rows();
  const MatX<Scalar> eye = MatX<Scalar>::Identity(n, n);

  ConvergenceReport<Scalar> r;
  r.kappa = grid;
  r.rho.resize(grid.size());
  r.sigma_max.resize(grid.size());

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const MatX<Scalar> learn = eye + grid[i] * lifted.p;  // I - P L
      r.rho[i] = spectral_radius(q * learn);
      r.sigma_max[i] = max_singular_value(pqp * learn);
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(grid.size()));
  std::vector<std::thread> pool;
  const std::size_t chunk = (grid.size() + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t b = t * chunk, e = std::min(grid.size(), b + chunk);
    if (b < e) pool.emplace_back(work, b, e);
  }
  for (auto& th : pool) th.join();

  const Scalar limit = Scalar(1) - Scalar(kCertificateMargin);
  r.as.resize(grid.size());
  r.mc.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    r.as[i] = r.rho[i] < limit;
    r.mc[i] = r.sigma_max[i] < limit;
  }
  const auto it = std::min_element(r.rho.begin(), r.rho.end());
  r.argmin_kappa = grid[static_cast<std::size_t>(it - r.rho.begin())];
  r.min_rho = *it;
  return r;
}

/// Per-cycle error norms ||e^c||_2 = ||y^c||_2 and the energy ratio
/// sum_h ||y^{c,h}|| / sum_h ||u^{c,h}||.
struct ErrorNorms {
  std::vector<double> norm;
  std::vector<double> energy_ratio;
};

/// `Result` exposes 24 x N matrices `y` and `u`.
template <typename Result>
ErrorNorms error_norms(const std::vector<Result>& results) {
  if (results.empty()) throw ConfigError("error_norms: no cycles");
  ErrorNorms out;
  for (const Result& r : results) {
    out.norm.push_back(r.y.norm());
    const double num = r.y.rowwise().norm().sum();
    const double den = r.u.rowwise().norm().sum();
    if (den > 0) out.energy_ratio.push_back(num / den);
    else out.energy_ratio.push_back(num > 0 ? std::numeric_limits<double>::infinity() : 0.0);
  }
  return out;
}

}  // namespace gridilc

#endif  // GRIDILC_ANALYSIS_HPP
