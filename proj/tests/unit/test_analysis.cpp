#include "gridilc/analysis.hpp"
#include "gridilc/scenario.hpp"

#include <doctest.h>

#include <random>

using namespace gridilc;

namespace {

GridParams<double> toy_node() {
  GridParams<double> p;
  p.n_nodes = 1;
  p.inertia = Vec::Constant(1, 3.0);
  p.kp = Vec::Constant(1, 150.0);
  p.ki = Vec::Constant(1, 0.02);
  p.t_li = Vec::Constant(1, 0.1);
  p.coupling = Mat::Zero(1, 1);
  return p;
}

// Largest singular value by power iteration on M^T M from a random start.
double power_norm(const Mat& m, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec x(m.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = g(rng);
  double est = 0;
  for (int it = 0; it < 5000; ++it) {
    x = m.transpose() * (m * x);
    x.normalize();
    est = (m * x).norm();
  }
  return est;
}

struct Struct {
  Mat y, u;
};

// Shared across test cases: the reference design sweep takes a few seconds.
const ConvergenceReport<double>& reference_sweep() {
  static const ConvergenceReport<double> r = [] {
    ScenarioConfig cfg;
    return kappa_sweep(design_lifted(cfg), design_q_hour(cfg), design_grid(cfg));
  }();
  return r;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("no learning and no filtering is not asymptotically stable") {
  const auto lifted = build_p_matrix(build_compound_plant(reference_grid()), 435, 1.0);
  const auto f = make_filters(Mat::Identity(24, 24).eval(), 4, 0.0);
  const double rho = asymptotic_stability(lifted, f);
  CHECK(rho == doctest::Approx(1.0).epsilon(1e-12));
  const auto r = kappa_sweep(lifted, Mat::Identity(24, 24).eval(), {0.0});
  CHECK_FALSE(r.as[0]);
}

TEST_CASE("perfect inverse-model learning has a zero monotonicity bound") {
  const auto lifted = build_p_matrix(build_compound_plant(reference_grid()), 435, 1.0);
  LiftedFilters<double> f = make_filters(Mat::Identity(24, 24).eval(), 4, 1.0);
  f.l = lifted_inverse(lifted);
  CHECK(monotonic_convergence(lifted, f) < 1e-10);
}

TEST_CASE("reference design certificates") {
  const auto& r = reference_sweep();
  REQUIRE(r.kappa.size() == 401);
  for (std::size_t i = 0; i < r.kappa.size(); ++i) {
    if (r.kappa[i] > 0) CHECK(r.as[i]);
    if (std::abs(r.kappa[i] - 1.0) < 1e-12) CHECK(r.rho[i] < 0.5);
  }
  CHECK_FALSE(r.as[0]);
  CHECK(r.argmin_kappa == doctest::Approx(1.205).epsilon(0.15 / 1.205));
  CHECK(r.min_rho == doctest::Approx(0.205).epsilon(0.05 / 0.205));
  const auto w = r.mc_window();
  REQUIRE(w.has_value());
  CHECK(w->first == doctest::Approx(0.025).epsilon(0.15 / 0.025));
  CHECK(w->second == doctest::Approx(1.6775).epsilon(0.15 / 1.6775));
  CHECK(w->first > 0.0);
  CHECK(w->second < 2.0);
  // rho at kappa = 0 is rho(Q) = 1: the unit eigenvalue of a unit-DC-gain filter.
  CHECK(r.rho[0] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("single-point zero-gain grid is flagged unstable") {
  ScenarioConfig cfg;
  const auto r = kappa_sweep(design_lifted(cfg), design_q_hour(cfg), {0.0});
  CHECK_FALSE(r.as[0]);
  CHECK_FALSE(r.mc[0]);
  CHECK_FALSE(r.mc_window().has_value());
  CHECK_THROWS_AS(kappa_sweep(design_lifted(cfg), design_q_hour(cfg), {}), ConfigError);
}

TEST_CASE("monotonicity bound agrees with a power-iteration operator norm") {
  const auto lifted = build_p_matrix(build_compound_plant(toy_node()), 435, 1.0);
  std::mt19937_64 rng(17);
  for (double kappa : {0.3, 1.0, 1.7}) {
    const auto f = make_filters(build_q_hour(1.0 / 3.0, 1), 1, kappa);
    const Mat m = lifted.p * f.q * lifted_inverse(lifted) * (Mat::Identity(24, 24) - lifted.p * f.l);
    const double sigma = monotonic_convergence(lifted, f);
    CHECK(std::abs(power_norm(m, rng) - sigma) < 0.01 * sigma);
    // Random directions never exceed the bound.
    std::normal_distribution<double> g;
    double best = 0;
    for (int trial = 0; trial < 10000; ++trial) {
      Vec x(24);
      for (int i = 0; i < 24; ++i) x[i] = g(rng);
      best = std::max(best, (m * x).norm() / x.norm());
    }
    CHECK(best <= sigma * (1 + 1e-12));
  }
}

TEST_CASE("spectral radius is invariant under the P similarity") {
  const auto lifted = build_p_matrix(build_compound_plant(reference_grid()), 435, 1.0);
  const Mat p_inv = lifted_inverse(lifted);
  for (double kappa : {0.25, 1.0, 1.9}) {
    const auto f = make_filters(build_q_hour(1.0 / 3.0, 1), 4, kappa);
    const Mat lhs = f.q * (Mat::Identity(96, 96) - lifted.p * f.l);
    const Mat rhs = lifted.p * lhs * p_inv;
    CHECK(std::abs(spectral_radius(lhs) - spectral_radius(rhs)) < 1e-8);
    CHECK(spectral_radius(lhs) <= monotonic_convergence(lifted, f) + 1e-12);
  }
}

TEST_CASE("certificates are deterministic") {
  const auto lifted = build_p_matrix(build_compound_plant(reference_grid()), 435, 1.0);
  const std::vector<double> grid = {0.1, 0.7, 1.3};
  const auto a = kappa_sweep(lifted, build_q_hour(1.0 / 3.0, 1), grid, 1);
  const auto b = kappa_sweep(lifted, build_q_hour(1.0 / 3.0, 1), grid, 3);
  CHECK(a.rho == b.rho);
  CHECK(a.sigma_max == b.sigma_max);
}

TEST_CASE("error norms of trivial outputs") {
  std::vector<Struct> runs(2);
  runs[0].y = Mat::Zero(24, 2);
  runs[0].u = Mat::Zero(24, 2);
  runs[1].y = Mat::Zero(24, 2);
  runs[1].y(7, 1) = -3.5;
  runs[1].u = Mat::Ones(24, 2);
  const auto n = error_norms(runs);
  CHECK(n.norm[0] == 0.0);
  CHECK(n.norm[1] == 3.5);
  CHECK(n.energy_ratio[0] == 0.0);
  CHECK(n.energy_ratio[1] == doctest::Approx(3.5 / (24 * std::sqrt(2.0))));
  CHECK_THROWS_AS(error_norms(std::vector<Struct>{}), ConfigError);
}

}  // TEST_SUITE
