#include "cmpw/eigenref.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cmpw/errors.hpp"

namespace cmpw {

EigenPairs reference_eigenpairs(const HamiltonianOp& op, int m) {
  const int n = op.grid.n;
  require(m >= 1 && m <= n, Err::MTooLarge,
          "requested eigenpair count outside [1, n]");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.dense());
  require(es.info() == Eigen::Success, Err::ConfigInvalid,
          "dense eigensolver failed");
  EigenPairs out;
  out.values = es.eigenvalues().head(m);
  out.vectors = es.eigenvectors().leftCols(m) / std::sqrt(op.grid.dx);
  for (int j = 0; j < m; ++j) {
    int imax = 0;
    out.vectors.col(j).cwiseAbs().maxCoeff(&imax);
    if (out.vectors(imax, j) < 0.0) out.vectors.col(j) *= -1.0;
  }
  return out;
}

Eigen::VectorXd free_electron_eigenvalues(double L, int m) {
  require(L > 0.0 && std::isfinite(L), Err::NonPositiveLength,
          "domain length must be positive");
  require(m >= 1, Err::MTooLarge, "eigenvalue count must be positive");
  Eigen::VectorXd out(m);
  out[0] = 0.0;
  for (int i = 1; i < m; ++i) {
    const int k = (i + 1) / 2;
    const double g = 2.0 * M_PI * k / L;
    out[i] = 0.5 * g * g;
  }
  return out;
}

Eigen::MatrixXd projected_hamiltonian(const Eigen::MatrixXd& modes,
                                      const HamiltonianOp& op) {
  require(static_cast<int>(modes.rows()) == op.grid.n, Err::GridMismatch,
          "mode length != grid size");
  require(modes.cols() >= 1, Err::GridMismatch, "empty mode set");
  Eigen::MatrixXd a = op.grid.dx * (modes.transpose() * op.apply(modes));
  return 0.5 * (a + a.transpose());
}

Eigen::VectorXd projected_spectrum(const Eigen::MatrixXd& modes,
                                   const HamiltonianOp& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      projected_hamiltonian(modes, op));
  require(es.info() == Eigen::Success, Err::ConfigInvalid,
          "projected eigensolver failed");
  return es.eigenvalues();
}

double relative_eigenvalue_error(const Eigen::VectorXd& sigma,
                                 const Eigen::VectorXd& lambda, int m) {
  require(m >= 1 && m <= sigma.size() && m <= lambda.size(), Err::MTooLarge,
          "comparison length exceeds an eigenvalue list");
  const double den = lambda.head(m).norm();
  require(den > 0.0, Err::ZeroDenominator,
          "reference eigenvalues have zero norm");
  return (sigma.head(m) - lambda.head(m)).norm() / den;
}

double localization_spread(const PeriodicGrid& grid, const Field& mode) {
  require(static_cast<int>(mode.size()) == grid.n, Err::GridMismatch,
          "mode length != grid size");
  const double nrm = norm_w(grid, mode);
  require(std::abs(nrm - 1.0) <= 1e-8, Err::UnnormalizedInput,
          "mode is not unit-normalized");
  const Field w = mode.cwiseProduct(mode) * grid.dx;
  double best = std::numeric_limits<double>::infinity();
  for (int c = 0; c < grid.n; ++c) {
    double s = 0.0;
    for (int i = 0; i < grid.n; ++i) {
      const double d = grid.wrap(grid.node(i) - grid.node(c));
      s += d * d * w[i];
    }
    best = std::min(best, s);
  }
  return best;
}

}  // namespace cmpw
