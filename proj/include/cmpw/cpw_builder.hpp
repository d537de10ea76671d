#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cmpw/fourier.hpp"
#include "cmpw/grid.hpp"

namespace cmpw {

/// Lagrange multipliers of the shift-orthonormality constraints, reduced to
/// j = 0..floor(N0/2) by the symmetry gamma_j = gamma_{N0-j}.
struct GammaSystem {
  Eigen::VectorXd gamma;
  Eigen::VectorXd residuals;
  int newton_iters = 0;
};

/// Ladder of compactly supported waves whose integer-w translates form an
/// orthonormal family. Modes are stored centered at L/2 with exact zeros
/// outside their support interval; fourier holds the matching real
/// coefficient vectors over the full DFT layout.
struct BcpwSet {
  PeriodicGrid grid;
  double w = 0.0;
  int N0 = 0;
  double mu = 0.0;
  std::vector<Field> modes;
  std::vector<Eigen::VectorXd> fourier;
  /// Per-level support as a cyclic interval [start, start+length) in x units.
  std::vector<std::pair<double, double>> support;

  int levels() const { return static_cast<int>(modes.size()); }

  /// Samples of the translate psi^level(x - j w); level is 1-based.
  Field member(int level, int j) const;

  /// Support interval of member (level, j) as (start, length) in x units.
  std::pair<double, double> member_support(int level, int j) const;

  /// All members as columns, level-major then shift.
  Eigen::MatrixXd family_matrix() const;
};

struct CpwOptions {
  int max_iter = 60000;
  /// Max-norm tolerance on psi - u; also bounds the pointwise tail trimmed
  /// when the accepted mode is truncated to its sparse support. The
  /// shift-orthonormality defect of the truncated mode lands near 3x this
  /// value, so the default keeps it safely inside the 1e-6 budget. The
  /// constrained mode carries power-law spectral tails, so the sparse
  /// support grows by one cell per ~delta/tail iterations; tolerances much
  /// below the tail amplitude are unreachable on long domains.
  double tol_split = 1e-7;
  /// Penalty weight; nonpositive selects mu*N0/20 with floors keeping the
  /// shrink threshold below the mode amplitude and the Bregman tail plateau
  /// below the split tolerance.
  double lambda_pen = 0.0;
  double gamma_tol = 1e-13;
  int newton_max = 80;
  int levels = 6;
};

enum class GammaMethod { Auto, Bisection, Newton };

/// Solves for the multipliers making psi_G = lambda (u_G - b_G) / (lambda +
/// G^2 + 2 sum_j gamma_j cos(G j w)) satisfy the shift constraints
/// sum_G cos(G j w) psi_G^2 = delta_j0. Inputs and output are real
/// coefficient vectors over the full DFT layout (even functions).
std::pair<Eigen::VectorXd, GammaSystem> solve_gamma_system(
    const Eigen::VectorXd& uG, const Eigen::VectorXd& bG, double lambda_pen,
    double w, const PeriodicGrid& grid,
    GammaMethod method = GammaMethod::Auto);

/// One ladder level via shrinkage iterations around the constrained Fourier
/// subproblem; previous levels enter as explicit orthogonal-complement
/// projections. Returns the accepted mode (centered, sign-fixed, truncated
/// to its support).
Field solve_bcpw(const PeriodicGrid& grid, int level, const BcpwSet& previous,
                 double mu, double w, const CpwOptions& opts = {});

BcpwSet build_bcpw_set(const PeriodicGrid& grid, int levels, double mu,
                       double w, const CpwOptions& opts = {});

/// |psi^level_G|^2 over the full DFT layout; sums to 1.
Eigen::VectorXd spectral_weight(const BcpwSet& set, int level);

/// Aggregate weight N0 * sum_level |psi^level_G|^2 over the full DFT layout
/// (diagnostic for band coverage; near 1 on covered slots).
Eigen::VectorXd cumulative_band_profile(const BcpwSet& set);

/// Rebuilds the ladder with parameters (s^{5/2} mu, s w) on a companion grid
/// of length s L and compares sqrt(s) psi_scaled(s x) with psi(x); returns
/// the largest relative L2 residual over levels.
double verify_scaling(const BcpwSet& set, double s,
                      const CpwOptions& opts = {});

/// Residuals r(n,i,j) = <psi^n, psi^i(. - j w)> - delta_ni delta_j0 for all
/// built pairs, flattened to rows (n-1)*levels + (i-1) and columns j.
Eigen::MatrixXd shift_orthogonality_residual(const BcpwSet& set);

double max_shift_residual(const BcpwSet& set);

}  // namespace cmpw
