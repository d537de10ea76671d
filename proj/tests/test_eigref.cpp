#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cmpw/eigenref.hpp"
#include "cmpw/errors.hpp"
#include "cmpw/potential.hpp"
#include "oracles.hpp"

using namespace cmpw;

namespace {

HamiltonianOp kp_op(double L, int n, KineticStencil st) {
  const PeriodicGrid g = build_grid(L, n);
  return assemble_hamiltonian(
      g, eval_potential(PotentialSpec::kronig_penney(static_cast<int>(L / 10)), g),
      st);
}

HamiltonianOp free_op(double L, int n, KineticStencil st) {
  const PeriodicGrid g = build_grid(L, n);
  return assemble_hamiltonian(g, eval_potential(PotentialSpec::free(), g), st);
}

}  // namespace

TEST_CASE("eigenvalues agree with a Jacobi iteration oracle") {
  const HamiltonianOp op = kp_op(20.0, 48, KineticStencil::SecondOrderFD);
  const Eigen::VectorXd slow = oracle::jacobi_eigenvalues(op.dense());
  const EigenPairs fast = reference_eigenpairs(op, 10);
  for (int i = 0; i < 10; ++i)
    CHECK(fast.values[i] == doctest::Approx(slow[i]).epsilon(1e-10));
}

TEST_CASE("fd free spectrum follows the discrete dispersion") {
  const HamiltonianOp op = free_op(25.0, 64, KineticStencil::SecondOrderFD);
  const EigenPairs p = reference_eigenpairs(op, 9);
  // FD symbol (1 - cos(G dx)) / dx^2, sorted with cosine pair degeneracy.
  std::vector<double> want;
  for (int k = -32; k < 32; ++k) {
    const double G = 2.0 * M_PI * k / op.grid.L;
    want.push_back((1.0 - std::cos(G * op.grid.dx)) /
                   (op.grid.dx * op.grid.dx));
  }
  std::sort(want.begin(), want.end());
  for (int i = 0; i < 9; ++i)
    CHECK(p.values[i] == doctest::Approx(want[i]).epsilon(1e-10));
}

TEST_CASE("spectral free spectrum is exact") {
  const HamiltonianOp op = free_op(50.0, 64, KineticStencil::Spectral);
  const EigenPairs p = reference_eigenpairs(op, 20);
  const Eigen::VectorXd want = free_electron_eigenvalues(50.0, 20);
  for (int i = 0; i < 20; ++i)
    CHECK(p.values[i] == doctest::Approx(want[i]).epsilon(1e-9));
}

TEST_CASE("free electron eigenvalue table") {
  const Eigen::VectorXd v = free_electron_eigenvalues(50.0, 6);
  CHECK(v[0] == 0.0);
  CHECK(v[1] == doctest::Approx(0.007895683520871487).epsilon(1e-14));
  CHECK(v[2] == doctest::Approx(0.007895683520871487).epsilon(1e-14));
  CHECK(v[3] == doctest::Approx(0.03158273408348595).epsilon(1e-14));
  CHECK(v[4] == doctest::Approx(0.03158273408348595).epsilon(1e-14));
  CHECK(v[5] == doctest::Approx(0.07106115168784338).epsilon(1e-14));
  CHECK(v.head(5).sum() == doctest::Approx(0.07895683520871488).epsilon(1e-14));
}

TEST_CASE("eigenvectors are weighted orthonormal and sign fixed") {
  const HamiltonianOp op = kp_op(30.0, 60, KineticStencil::SecondOrderFD);
  const EigenPairs p = reference_eigenpairs(op, 8);
  Eigen::MatrixXd gram = op.grid.dx * p.vectors.transpose() * p.vectors;
  gram.diagonal().array() -= 1.0;
  CHECK(gram.cwiseAbs().maxCoeff() <= 1e-10);
  for (int j = 0; j < 8; ++j) {
    int imax = 0;
    p.vectors.col(j).cwiseAbs().maxCoeff(&imax);
    CHECK(p.vectors(imax, j) > 0.0);
  }
}

TEST_CASE("eigensolver input validation") {
  const HamiltonianOp op = free_op(10.0, 16, KineticStencil::SecondOrderFD);
  CHECK_THROWS_AS(reference_eigenpairs(op, 0), Error);
  CHECK_THROWS_AS(reference_eigenpairs(op, 17), Error);
  try {
    reference_eigenpairs(op, 17);
  } catch (const Error& e) {
    CHECK(e.code == Err::MTooLarge);
  }
}

TEST_CASE("projected hamiltonian matches direct quadrature") {
  const HamiltonianOp op = kp_op(20.0, 40, KineticStencil::SecondOrderFD);
  const EigenPairs p = reference_eigenpairs(op, 4);
  const Eigen::MatrixXd a = projected_hamiltonian(p.vectors, op);
  const Eigen::MatrixXd dense = oracle::dense_fd(op.grid, op.potential.values);
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) {
      const Field hv = dense * p.vectors.col(k);
      const double want = oracle::dot_w(op.grid, p.vectors.col(j), hv);
      CHECK(a(j, k) == doctest::Approx(want).epsilon(1e-10));
    }
  CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);

  const PeriodicGrid other = build_grid(20.0, 80);
  Eigen::MatrixXd wrong = Eigen::MatrixXd::Zero(other.n, 2);
  CHECK_THROWS_AS(projected_hamiltonian(wrong, op), Error);
}

TEST_CASE("projected spectrum of exact eigenvectors reproduces eigenvalues") {
  const HamiltonianOp op = kp_op(20.0, 48, KineticStencil::SecondOrderFD);
  const EigenPairs p = reference_eigenpairs(op, 6);
  const Eigen::VectorXd sigma = projected_spectrum(p.vectors, op);
  for (int i = 0; i < 6; ++i)
    CHECK(sigma[i] == doctest::Approx(p.values[i]).epsilon(1e-11));
}

TEST_CASE("relative eigenvalue error") {
  Eigen::VectorXd lam(2), sig(2);
  lam << 1.0, 2.0;
  sig << 1.0, 2.0;
  CHECK(relative_eigenvalue_error(sig, lam, 2) == 0.0);
  sig << 1.1, 2.0;
  CHECK(relative_eigenvalue_error(sig, lam, 2) ==
        doctest::Approx(0.044721359549995794).epsilon(1e-14));
  CHECK_THROWS_AS(relative_eigenvalue_error(sig, lam, 3), Error);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(relative_eigenvalue_error(sig, zero, 2), Error);
}

TEST_CASE("localization spread") {
  const PeriodicGrid g = build_grid(20.0, 200);
  // Normalized spike carries no second moment about itself.
  Field spike = Field::Zero(g.n);
  spike[50] = 1.0 / std::sqrt(g.dx);
  CHECK(localization_spread(g, spike) == doctest::Approx(0.0).epsilon(1e-12));

  Field bump(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double d = g.wrap(g.node(i) - 7.0);
    bump[i] = std::exp(-d * d);
  }
  bump /= norm_w(g, bump);
  const double got = localization_spread(g, bump);
  // Quadrature oracle about the known center.
  double want = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double d = g.wrap(g.node(i) - 7.0);
    want += g.dx * d * d * bump[i] * bump[i];
  }
  CHECK(got == doctest::Approx(want).epsilon(1e-8));

  // Cyclic translation leaves the spread unchanged.
  Field rolled(g.n);
  for (int i = 0; i < g.n; ++i) rolled[i] = bump[(i + 63) % g.n];
  CHECK(localization_spread(g, rolled) == doctest::Approx(got).epsilon(1e-10));

  CHECK_THROWS_AS(localization_spread(g, 2.0 * bump), Error);
}
