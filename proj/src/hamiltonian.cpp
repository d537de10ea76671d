#include "cmpw/hamiltonian.hpp"

#include "cmpw/errors.hpp"
#include "cmpw/fourier.hpp"

namespace cmpw {

namespace {

Field apply_fd(const PeriodicGrid& g, const Field& v, const Field& u) {
  const int n = g.n;
  const double k = 0.5 / (g.dx * g.dx);
  Field out(n);
  for (int i = 0; i < n; ++i) {
    const double left = u[i == 0 ? n - 1 : i - 1];
    const double right = u[i == n - 1 ? 0 : i + 1];
    out[i] = k * (2.0 * u[i] - left - right) + v[i] * u[i];
  }
  return out;
}

Field apply_spectral(const PeriodicGrid& g, const Field& v, const Field& u) {
  CVec c = spectrum(g, u);
  for (int m = 0; m < g.n; ++m) {
    const double G = freq(g, m);
    c[m] *= 0.5 * G * G;
  }
  return from_spectrum(g, c) + v.cwiseProduct(u);
}

}  // namespace

Field HamiltonianOp::apply(const Field& u) const {
  require(static_cast<int>(u.size()) == grid.n, Err::LengthMismatch,
          "field length != grid size");
  return stencil == KineticStencil::SecondOrderFD
             ? apply_fd(grid, potential.values, u)
             : apply_spectral(grid, potential.values, u);
}

Eigen::MatrixXd HamiltonianOp::apply(const Eigen::MatrixXd& u) const {
  require(static_cast<int>(u.rows()) == grid.n, Err::LengthMismatch,
          "field length != grid size");
  Eigen::MatrixXd out(u.rows(), u.cols());
  for (int j = 0; j < u.cols(); ++j) out.col(j) = apply(Field(u.col(j)));
  return out;
}

Eigen::MatrixXd HamiltonianOp::dense() const {
  const int n = grid.n;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  if (stencil == KineticStencil::SecondOrderFD) {
    const double k = 0.5 / (grid.dx * grid.dx);
    for (int i = 0; i < n; ++i) {
      h(i, i) = 2.0 * k;
      h(i, (i + 1) % n) = -k;
      h(i, (i + n - 1) % n) = -k;
    }
  } else {
    // Kinetic part is a symmetric circulant; build its first column by
    // transforming the multiplier symbol back to node space.
    CVec symbol(n);
    for (int m = 0; m < n; ++m) {
      const double G = freq(grid, m);
      symbol[m] = 0.5 * G * G;
    }
    fft(symbol, false);
    symbol /= static_cast<double>(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) h(i, j) = symbol[(i - j + n) % n].real();
  }
  h.diagonal() += potential.values;
  return h;
}

HamiltonianOp assemble_hamiltonian(const PeriodicGrid& grid,
                                   const PotentialField& potential,
                                   KineticStencil stencil) {
  require(static_cast<int>(potential.values.size()) == grid.n,
          Err::LengthMismatch, "potential length != grid size");
  return HamiltonianOp{grid, potential, stencil};
}

Field apply_hamiltonian(const HamiltonianOp& op, const Field& u) {
  return op.apply(u);
}

}  // namespace cmpw
