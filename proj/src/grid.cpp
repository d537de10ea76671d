#include "cmpw/grid.hpp"

#include <cmath>

#include "cmpw/errors.hpp"

namespace cmpw {

Eigen::VectorXd PeriodicGrid::nodes() const {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = node(i);
  return x;
}

double PeriodicGrid::wrap(double d) const {
  d -= L * std::floor(d / L + 0.5);
  return d;
}

PeriodicGrid build_grid(double L, int n) {
  require(L > 0.0 && std::isfinite(L), Err::NonPositiveLength,
          "domain length must be positive");
  require(n >= 4 && n % 2 == 0, Err::OddOrTinyNodeCount,
          "node count must be even and >= 4");
  return PeriodicGrid{L, n, L / n};
}

double dot_w(const PeriodicGrid& g, const Field& u, const Field& v) {
  require(u.size() == g.n && v.size() == g.n, Err::LengthMismatch,
          "field length != grid size");
  return g.dx * u.dot(v);
}

double norm_w(const PeriodicGrid& g, const Field& u) {
  return std::sqrt(dot_w(g, u, u));
}

double norm1_w(const PeriodicGrid& g, const Field& u) {
  require(u.size() == g.n, Err::LengthMismatch, "field length != grid size");
  return g.dx * u.array().abs().sum();
}

}  // namespace cmpw
