#pragma once

#include <Eigen/Core>

namespace cmpw {

using Field = Eigen::VectorXd;

/// Uniform periodic grid on [0, L): nodes x_i = i*dx, i = 0..n-1.
struct PeriodicGrid {
  double L = 0.0;
  int n = 0;
  double dx = 0.0;

  double node(int i) const { return i * dx; }
  Eigen::VectorXd nodes() const;

  /// Minimum-image signed distance a-b wrapped to [-L/2, L/2).
  double wrap(double d) const;

  bool operator==(const PeriodicGrid& o) const { return L == o.L && n == o.n; }
};

PeriodicGrid build_grid(double L, int n);

/// Weighted inner product dx * sum(u_i v_i), the discrete surrogate for the
/// domain integral.
double dot_w(const PeriodicGrid& g, const Field& u, const Field& v);
double norm_w(const PeriodicGrid& g, const Field& u);
double norm1_w(const PeriodicGrid& g, const Field& u);

}  // namespace cmpw
