#pragma once

#include <Eigen/Core>

#include "cmpw/grid.hpp"
#include "cmpw/potential.hpp"

namespace cmpw {

enum class KineticStencil { SecondOrderFD, Spectral };

/// Single-particle operator H = -(1/2) d^2/dx^2 + V(x) on a periodic grid.
struct HamiltonianOp {
  PeriodicGrid grid;
  PotentialField potential;
  KineticStencil stencil = KineticStencil::SecondOrderFD;

  Field apply(const Field& u) const;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& u) const;

  /// Dense matrix in node coordinates; symmetric.
  Eigen::MatrixXd dense() const;

  double min_potential() const { return potential.values.minCoeff(); }
};

HamiltonianOp assemble_hamiltonian(const PeriodicGrid& grid,
                                   const PotentialField& potential,
                                   KineticStencil stencil);

Field apply_hamiltonian(const HamiltonianOp& op, const Field& u);

}  // namespace cmpw
