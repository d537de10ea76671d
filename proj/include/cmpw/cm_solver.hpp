#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "cmpw/hamiltonian.hpp"

namespace cmpw {

/// A set of spatially localized modes, stored as columns. Columns are
/// orthonormal in the weighted inner product, sorted by ascending Rayleigh
/// quotient, and sign-fixed so each column has nonnegative weighted mean.
struct ModeSet {
  PeriodicGrid grid;
  Eigen::MatrixXd modes;
  double mu = 0.0;
  double objective = 0.0;

  int count() const { return static_cast<int>(modes.cols()); }
};

/// Split-variable state of the sparse orthogonality solver. Psi is the
/// energy iterate, Q the shrinkage copy, P the orthonormalized copy, and
/// b, B the accumulated constraint mismatches feeding back into Psi.
struct SocState {
  Eigen::MatrixXd Psi, Q, P, b, B;
  double lambda_pen = 0.0;
  double r_pen = 0.0;
  int iter = 0;
  std::vector<double> split_q;
  std::vector<double> split_p;
  std::vector<double> objective_hist;
};

struct SolveOptions {
  int max_iter = 20000;
  /// Normalized Frobenius tolerance on both split residuals.
  double tol_split = 1e-6;
  /// Relative objective change that must hold over consecutive iterations.
  double tol_obj = 1e-8;
  int obj_window = 5;
  std::uint64_t seed = 20250501;
  /// Penalty weights; nonpositive values select mu*N/20 and mu*N/5.
  double lambda_pen = 0.0;
  double r_pen = 0.0;
  /// Orthogonality constraint: 0 enforces the full set, p >= 1 only pairs
  /// within cyclic band p (columns are kept sorted by support centroid).
  int band_p = 0;
  /// Inner linear solver: Gauss-Seidel sweeps for the FD stencil, conjugate
  /// gradients otherwise or when cg_tol > 0.
  int gs_sweeps = 5;
  double cg_tol = 0.0;
  /// Error out instead of returning the best iterate when the iteration
  /// budget is exhausted.
  bool strict = false;
};

struct SolveResult {
  ModeSet modes;
  SocState state;
  bool converged = false;
};

/// Soft threshold toward zero by delta >= 0, elementwise.
Eigen::MatrixXd shrink(const Eigen::MatrixXd& u, double delta);

/// Closest matrix with weighted-orthonormal columns (polar factor), via the
/// eigendecomposition of the weighted Gram matrix dx * A^T A.
Eigen::MatrixXd orthonormal_projection(const PeriodicGrid& grid,
                                       const Eigen::MatrixXd& a);

/// Enforce <a_j, a_k> = delta_jk only for column pairs with cyclic index
/// distance <= p, by sweeping local symmetric orthonormalizations. A band
/// covering every pair falls back to the full projection.
Eigen::MatrixXd banded_orthonormalize(const PeriodicGrid& grid,
                                      const Eigen::MatrixXd& a, int p);

/// One energy-descent half step: solves (2H + (lambda+r) I) Psi =
/// r (P - B) + lambda (Q - b), warm-started from state.Psi.
Eigen::MatrixXd psi_update(const HamiltonianOp& op, const SocState& state,
                           const SolveOptions& opts);

SolveResult solve_cm(const HamiltonianOp& op, int n_modes, double mu,
                     const SolveOptions& opts = {});

/// Objective value (1/mu) sum_j |psi_j|_1 + sum_j <psi_j, H psi_j> in the
/// weighted norms.
double cm_objective(const HamiltonianOp& op, const Eigen::MatrixXd& modes,
                    double mu);

/// Flip column signs so each column has nonnegative weighted mean.
void canonicalize_signs(const PeriodicGrid& grid, Eigen::MatrixXd& modes);

/// First mode of the free-space problem: interior arch
/// (1/(lambda*mu)) (1 + cos(sqrt(lambda) (x - L/2))) for |x - L/2| <= l,
/// zero elsewhere, with lambda = (3 pi)^{2/5} mu^{-4/5} and l = pi/sqrt(lambda).
double closed_form_lambda(double mu);
double closed_form_halfwidth(double mu);
double closed_form_psi1(double mu, double L, double x);
Field sample_closed_form_psi1(double mu, const PeriodicGrid& grid);

/// Circular mean position of a nonnegative weight profile, in [0, L).
double circular_centroid(const PeriodicGrid& grid, const Field& weights);

/// Total length of {x_i : |u_i| > thresh}.
double support_measure(const PeriodicGrid& grid, const Field& u,
                       double thresh = 1e-6);

}  // namespace cmpw
