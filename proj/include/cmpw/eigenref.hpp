#pragma once

#include <Eigen/Core>

#include "cmpw/hamiltonian.hpp"

namespace cmpw {

/// Lowest eigenpairs of a dense Hamiltonian. Columns of vectors are
/// orthonormal in the weighted inner product and sign-fixed so the entry of
/// largest magnitude is positive.
struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

EigenPairs reference_eigenpairs(const HamiltonianOp& op, int m);

/// Eigenvalues of -(1/2) d^2/dx^2 on a ring of length L, sorted ascending
/// with multiplicity: 0, then pairs 2(pi k / L)^2.
Eigen::VectorXd free_electron_eigenvalues(double L, int m);

/// Rayleigh matrix A_jk = <psi_j, H psi_k> of a set of modes, symmetrized.
Eigen::MatrixXd projected_hamiltonian(const Eigen::MatrixXd& modes,
                                      const HamiltonianOp& op);

/// Ascending eigenvalues of the projected Hamiltonian.
Eigen::VectorXd projected_spectrum(const Eigen::MatrixXd& modes,
                                   const HamiltonianOp& op);

/// Normalized l2 distance between the first m entries of two ascending
/// eigenvalue lists: |sigma - lambda| / |lambda|.
double relative_eigenvalue_error(const Eigen::VectorXd& sigma,
                                 const Eigen::VectorXd& lambda, int m);

/// Second moment of |mode|^2 about its best cyclic center:
/// min_c sum_i dx * wrap(x_i - c)^2 mode_i^2 over node centers c.
/// Input must be normalized in the weighted inner product.
double localization_spread(const PeriodicGrid& grid, const Field& mode);

}  // namespace cmpw
