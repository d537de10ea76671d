#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "cmpw/errors.hpp"
#include "cmpw/fourier.hpp"
#include "cmpw/grid.hpp"
#include "cmpw/hamiltonian.hpp"
#include "cmpw/potential.hpp"
#include "oracles.hpp"

using namespace cmpw;

TEST_CASE("grid construction and spacing") {
  const PeriodicGrid g = build_grid(50.0, 128);
  CHECK(g.dx == 0.390625);
  CHECK(g.dx == 0.390625);
  CHECK(g.node(0) == 0.0);
  CHECK(g.node(127) == doctest::Approx(50.0 - 0.390625));

  CHECK_THROWS_AS(build_grid(0.0, 64), Error);
  CHECK_THROWS_AS(build_grid(-3.0, 64), Error);
  CHECK_THROWS_AS(build_grid(10.0, 63), Error);
  CHECK_THROWS_AS(build_grid(10.0, 2), Error);
  try {
    build_grid(-1.0, 64);
  } catch (const Error& e) {
    CHECK(e.code == Err::NonPositiveLength);
  }
  try {
    build_grid(10.0, 31);
  } catch (const Error& e) {
    CHECK(e.code == Err::OddOrTinyNodeCount);
  }
}

TEST_CASE("minimum image wrap") {
  const PeriodicGrid g = build_grid(10.0, 20);
  CHECK(g.wrap(0.0) == 0.0);
  CHECK(g.wrap(3.0) == doctest::Approx(3.0));
  CHECK(g.wrap(7.0) == doctest::Approx(-3.0));
  CHECK(g.wrap(-7.0) == doctest::Approx(3.0));
  CHECK(g.wrap(12.0) == doctest::Approx(2.0));
  CHECK(std::abs(g.wrap(123.456)) <= 5.0);
}

TEST_CASE("weighted inner products match direct sums") {
  const PeriodicGrid g = build_grid(17.0, 64);
  const Field u = oracle::random_field(g, 1);
  const Field v = oracle::random_field(g, 2);
  CHECK(dot_w(g, u, v) == doctest::Approx(oracle::dot_w(g, u, v)).epsilon(1e-14));
  CHECK(norm_w(g, u) == doctest::Approx(oracle::norm_w(g, u)).epsilon(1e-14));
  double l1 = 0.0;
  for (int i = 0; i < g.n; ++i) l1 += std::abs(u[i]) * g.dx;
  CHECK(norm1_w(g, u) == doctest::Approx(l1).epsilon(1e-14));
}

TEST_CASE("gaussian well lattice values") {
  // Grid chosen so the probe points are nodes.
  const PeriodicGrid g = build_grid(50.0, 500);
  const PotentialField kp = eval_potential(PotentialSpec::kronig_penney(5), g);
  // Well centers at x = 10..50; darkest directly on a center.
  CHECK(kp.values[100] == doctest::Approx(-1.007731840725672).epsilon(1e-13));
  const double e_half = std::exp(-100.0 / 18.0);
  CHECK(e_half == doctest::Approx(0.0038659201394728076).epsilon(1e-14));

  const PotentialField ikp =
      eval_potential(PotentialSpec::impurity_kronig_penney(5), g);
  // Default impurity site is the center well at x = 30.
  CHECK(ikp.values[300] == doctest::Approx(-2.007731840725672).epsilon(1e-13));
  // Away from the impurity the two lattices agree closely.
  CHECK(ikp.values[100] ==
        doctest::Approx(kp.values[100] - std::exp(-400.0 / 18.0)).epsilon(1e-10));

  const PotentialField none = eval_potential(PotentialSpec::free(), g);
  CHECK(none.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("tabulated potential validation") {
  const PeriodicGrid g = build_grid(10.0, 16);
  std::vector<double> vals(16, -0.5);
  const PotentialField t = eval_potential(PotentialSpec::tabulated(vals), g);
  CHECK(t.values[7] == -0.5);
  CHECK_THROWS_AS(
      eval_potential(PotentialSpec::tabulated(std::vector<double>(15, 0.0)), g),
      Error);
  std::vector<double> bad(16, 0.0);
  bad[3] = std::nan("");
  CHECK_THROWS_AS(eval_potential(PotentialSpec::tabulated(bad), g), Error);
}

TEST_CASE("fd hamiltonian equals the entrywise assembly") {
  const PeriodicGrid g = build_grid(12.0, 32);
  PotentialField V{oracle::random_field(g, 3)};
  const HamiltonianOp op =
      assemble_hamiltonian(g, V, KineticStencil::SecondOrderFD);
  const Eigen::MatrixXd want = oracle::dense_fd(g, V.values);
  const Eigen::MatrixXd got = op.dense();
  CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK((got - got.transpose()).cwiseAbs().maxCoeff() <= 1e-13);

  const Field u = oracle::random_field(g, 4);
  CHECK((op.apply(u) - want * u).cwiseAbs().maxCoeff() <= 1e-11);

  // The kinetic stencil annihilates constants.
  const Field ones = Field::Ones(g.n);
  CHECK((op.apply(ones) - V.values).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("spectral hamiltonian diagonalizes plane waves") {
  const PeriodicGrid g = build_grid(20.0, 64);
  PotentialField zero{Field::Zero(g.n)};
  const HamiltonianOp op = assemble_hamiltonian(g, zero, KineticStencil::Spectral);
  for (int k : {1, 3, 7}) {
    Field u(g.n);
    const double G = 2.0 * M_PI * k / g.L;
    for (int i = 0; i < g.n; ++i) u[i] = std::cos(G * g.node(i));
    const Field hu = op.apply(u);
    CHECK((hu - 0.5 * G * G * u).cwiseAbs().maxCoeff() <= 1e-10);
  }
  const Eigen::MatrixXd d = op.dense();
  CHECK((d - d.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  const Field u = oracle::random_field(g, 5);
  CHECK((d * u - op.apply(u)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("spectrum matches the naive transform") {
  const PeriodicGrid g = build_grid(9.0, 48);
  const Field u = oracle::random_field(g, 6);
  const CVec fast = spectrum(g, u);
  const Eigen::VectorXcd slow = oracle::naive_spectrum(g, u);
  CHECK((fast - slow).cwiseAbs().maxCoeff() <= 1e-11);

  // Parseval in the weighted norm.
  CHECK(fast.squaredNorm() == doctest::Approx(dot_w(g, u, u)).epsilon(1e-12));

  const Field back = from_spectrum(g, fast);
  CHECK((back - u).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("even spectrum round trips even fields") {
  const PeriodicGrid g = build_grid(14.0, 64);
  Field u(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double d = g.wrap(g.node(i));
    u[i] = std::exp(-d * d / 3.0);
  }
  const Eigen::VectorXd c = even_spectrum(g, u);
  const Field back = from_even_spectrum(g, c);
  CHECK((back - u).cwiseAbs().maxCoeff() <= 1e-12);
  // Even layout is symmetric under m -> n - m.
  for (int m = 1; m < g.n; ++m)
    CHECK(c[m] == doctest::Approx(c[g.n - m]).epsilon(1e-12));
}

TEST_CASE("spectral shift equals integer rolls on node multiples") {
  const PeriodicGrid g = build_grid(16.0, 64);
  const Field u = oracle::random_field(g, 7);
  const Field shifted = spectral_shift(g, u, 5 * g.dx);
  for (int i = 0; i < g.n; ++i)
    CHECK(shifted[i] == doctest::Approx(u[(i - 5 + g.n) % g.n]).epsilon(1e-10));
}

TEST_CASE("frequency layout") {
  const PeriodicGrid g = build_grid(50.0, 128);
  CHECK(signed_index(0, 128) == 0);
  CHECK(signed_index(64, 128) == 64);
  CHECK(signed_index(65, 128) == -63);
  CHECK(signed_index(127, 128) == -1);
  CHECK(freq(g, 1) == doctest::Approx(2.0 * M_PI / 50.0).epsilon(1e-15));
  CHECK(freq(g, 127) == doctest::Approx(-2.0 * M_PI / 50.0).epsilon(1e-15));
}
