#include "gridilc/grid_model.hpp"

#include <doctest.h>

#include <random>

using namespace gridilc;

namespace {

GridParams<double> uniform_grid(int n, double k) {
  GridParams<double> p;
  p.n_nodes = n;
  p.inertia = Vec::Constant(n, 5.0);
  p.kp = Vec::Constant(n, 200.0);
  p.ki = Vec::Constant(n, 0.01);
  p.t_li = Vec::Constant(n, 0.04);
  p.coupling = Mat::Constant(n, n, k);
  p.coupling.diagonal().setZero();
  return p;
}

// Random connected topology: a random spanning tree plus extra edges.
GridParams<double> random_connected(std::mt19937_64& rng, int n) {
  GridParams<double> p = uniform_grid(n, 0.0);
  std::uniform_real_distribution<double> w(0.5, 8.0), coin(0.0, 1.0);
  for (int j = 1; j < n; ++j) {
    const int parent = std::uniform_int_distribution<int>(0, j - 1)(rng);
    p.coupling(j, parent) = p.coupling(parent, j) = w(rng);
  }
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k)
      if (p.coupling(j, k) == 0 && coin(rng) < 0.3) p.coupling(j, k) = p.coupling(k, j) = w(rng);
  return p;
}

}  // namespace

TEST_SUITE("grid_model") {

TEST_CASE("fully connected reference coupling gives 18 on the diagonal and -6 elsewhere") {
  const Mat lap = build_laplacian(reference_grid());
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) CHECK(lap(j, k) == (j == k ? 18.0 : -6.0));
}

TEST_CASE("two uncoupled nodes have a zero Laplacian") {
  CHECK(build_laplacian(uniform_grid(2, 0.0)).isZero(0.0));
}

TEST_CASE("three-node chain spectrum matches its characteristic polynomial") {
  GridParams<double> p = uniform_grid(3, 0.0);
  p.coupling(0, 1) = p.coupling(1, 0) = 1;
  p.coupling(1, 2) = p.coupling(2, 1) = 1;
  const Mat lap = build_laplacian(p);

  // det(lambda I - L) = lambda^3 + c2 lambda^2 + c1 lambda + c0 by minors.
  const double c2 = -lap.trace();
  double c1 = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) c1 += lap(i, i) * lap(j, j) - lap(i, j) * lap(j, i);
  const double c0 = -lap.determinant();
  // Roots by Newton from well-separated starting points.
  std::vector<double> roots;
  for (double x : {-0.5, 1.2, 4.0}) {
    for (int it = 0; it < 100; ++it) {
      const double f = ((x + c2) * x + c1) * x + c0;
      const double df = (3 * x + 2 * c2) * x + c1;
      x -= f / df;
    }
    roots.push_back(x);
  }
  CHECK(roots[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(roots[1] == doctest::Approx(1.0));
  CHECK(roots[2] == doctest::Approx(3.0));

  Eigen::SelfAdjointEigenSolver<Mat> es(lap);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(es.eigenvalues()[i] - roots[i]) < 1e-12);
}

TEST_CASE("asymmetric, negative or self coupling is rejected") {
  GridParams<double> p = uniform_grid(3, 1.0);
  p.coupling(0, 1) = 2.0;
  CHECK_THROWS_AS(build_laplacian(p), ConfigError);
  p = uniform_grid(3, -1.0);
  CHECK_THROWS_AS(build_laplacian(p), ConfigError);
  p = uniform_grid(3, 1.0);
  p.coupling(1, 1) = 1.0;
  CHECK_THROWS_AS(validate(p), ConfigError);
}

TEST_CASE("nonpositive inertia, gains or time constants are rejected") {
  for (int field = 0; field < 4; ++field) {
    GridParams<double> p = reference_grid();
    switch (field) {
      case 0: p.inertia[2] = 0; break;
      case 1: p.kp[0] = -1; break;
      case 2: p.t_li[3] = 0; break;
      case 3: p.ki[1] = -0.1; break;
    }
    CHECK_THROWS_AS(build_compound_plant(p), ConfigError);
  }
  GridParams<double> ok = reference_grid();
  ok.ki.setZero();
  CHECK_NOTHROW(build_compound_plant(ok));
}

TEST_CASE("compound plant blocks follow the reference parameters") {
  const auto plant = build_compound_plant(reference_grid());
  const Mat lap = build_laplacian(reference_grid());
  const int n = 4;
  for (int k = 0; k < n; ++k) CHECK(plant.a(n, k) == doctest::Approx(-lap(0, k) / 5.0));
  CHECK(plant.a(n, n) == doctest::Approx(-400.0 / 5.0));
  CHECK(plant.a(2 * n + 1, n + 1) == doctest::Approx(-1.0 / 0.045));
  CHECK(plant.a(2 * n + 1, 2 * n + 1) == doctest::Approx(-0.004 / 0.045));
  CHECK((plant.e + plant.b).isZero(0.0));
  CHECK(plant.c_tilde.block(0, 0, n, n).isZero(0.0));
  CHECK(plant.c_tilde(2, n + 2) == -100.0);
  CHECK(plant.c_tilde.block(0, 2 * n, n, n).isIdentity(0.0));
}

TEST_CASE("reference plant is stable apart from the uniform phase shift") {
  const auto plant = build_compound_plant(reference_grid());
  Eigen::EigenSolver<Mat> es(plant.a);
  int zeros = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const auto l = es.eigenvalues()[i];
    if (std::abs(l) < 1e-9) ++zeros;
    else CHECK(l.real() < 0);
  }
  CHECK(zeros == 1);

  // The zero mode is the common phase offset.
  Vec shift = Vec::Zero(12);
  shift.head(4).setConstant(0.7);
  CHECK((plant.a * shift).norm() < 1e-12);
}

TEST_CASE("random connected topologies give PSD Laplacians of rank N-1") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 9)(rng);
    const auto p = random_connected(rng, n);
    REQUIRE(is_connected(p));
    const Mat lap = build_laplacian(p);
    CHECK((lap - lap.transpose()).isZero(0.0));
    CHECK(lap.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Mat> es(lap);
    CHECK(es.eigenvalues()[0] > -1e-10);
    CHECK(std::abs(es.eigenvalues()[0]) < 1e-10);
    CHECK(es.eigenvalues()[1] > 1e-8);

    // Uniform phase offsets leave the omega and chi blocks unchanged.
    const auto plant = build_compound_plant(p);
    Vec x = Vec::Random(3 * n);
    Vec shifted = x;
    shifted.head(n).array() += 1.3;
    CHECK(((plant.a * x) - (plant.a * shifted)).tail(2 * n).norm() < 1e-10);
  }
}

TEST_CASE("connectivity detection") {
  GridParams<double> p = uniform_grid(4, 0.0);
  p.coupling(0, 1) = p.coupling(1, 0) = 1;
  p.coupling(2, 3) = p.coupling(3, 2) = 1;
  CHECK_FALSE(is_connected(p));
  p.coupling(1, 2) = p.coupling(2, 1) = 1;
  CHECK(is_connected(p));
  CHECK(is_connected(uniform_grid(1, 0.0)));
}

TEST_CASE("single node reduces to a decoupled controller loop") {
  const auto plant = build_compound_plant(uniform_grid(1, 0.0));
  CHECK(plant.a.rows() == 3);
  CHECK(plant.a(1, 0) == 0.0);
}

}  // TEST_SUITE
