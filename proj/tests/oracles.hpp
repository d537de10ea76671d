#pragma once

// Independent reference implementations used to pin expected values in the
// tests. Everything here is deliberately naive: direct loops, quadrature and
// textbook algorithms, sharing no code with the library's fast paths.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cmpw/cpw_builder.hpp"
#include "cmpw/grid.hpp"

namespace oracle {

using cmpw::Field;
using cmpw::PeriodicGrid;

inline double dot_w(const PeriodicGrid& g, const Field& u, const Field& v) {
  double s = 0.0;
  for (int i = 0; i < g.n; ++i) s += u[i] * v[i];
  return s * g.dx;
}

inline double norm_w(const PeriodicGrid& g, const Field& u) {
  return std::sqrt(oracle::dot_w(g, u, u));
}

/// Periodic second order FD Hamiltonian assembled entry by entry.
inline Eigen::MatrixXd dense_fd(const PeriodicGrid& g, const Field& V) {
  const int n = g.n;
  const double k = 1.0 / (2.0 * g.dx * g.dx);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    h(i, i) = 2.0 * k + V[i];
    h(i, (i + 1) % n) -= k;
    h(i, (i + n - 1) % n) -= k;
  }
  return h;
}

/// Plane wave coefficients c_m = <e^{iG_m x}/sqrt(L), u> by direct summation.
inline Eigen::VectorXcd naive_spectrum(const PeriodicGrid& g, const Field& u) {
  const int n = g.n;
  Eigen::VectorXcd c(n);
  for (int m = 0; m < n; ++m) {
    std::complex<double> acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double ang = -2.0 * M_PI * m * i / n;
      acc += u[i] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    c[m] = acc * g.dx / std::sqrt(g.L);
  }
  return c;
}

/// Cyclic Jacobi eigenvalue iteration for a symmetric matrix, ascending.
inline Eigen::VectorXd jacobi_eigenvalues(Eigen::MatrixXd a) {
  const int n = static_cast<int>(a.rows());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-24) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int i = 0; i < n; ++i) {
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const double api = a(p, i), aqi = a(q, i);
          a(p, i) = c * api - s * aqi;
          a(q, i) = s * api + c * aqi;
        }
      }
    }
  }
  Eigen::VectorXd ev = a.diagonal();
  std::sort(ev.data(), ev.data() + n);
  return ev;
}

/// Samples of the shifted ladder member b^level_j by trigonometric synthesis
/// from the level's stored plane wave coefficients.
inline Field synth_member(const cmpw::BcpwSet& set, int level, int j) {
  const PeriodicGrid& g = set.grid;
  const Eigen::VectorXd& beta = set.fourier[level - 1];
  Field out = Field::Zero(g.n);
  for (int i = 0; i < g.n; ++i) {
    std::complex<double> acc = 0.0;
    for (int m = 0; m < g.n; ++m) {
      const int ks = m <= g.n / 2 ? m : m - g.n;
      const double G = 2.0 * M_PI * ks / g.L;
      const double ang = G * (g.node(i) - j * set.w);
      acc += beta[m] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[i] = acc.real() / std::sqrt(g.L);
  }
  return out;
}

/// Analysis coefficients by direct weighted quadrature against the members.
inline Eigen::MatrixXd direct_forward(const Field& f, const cmpw::BcpwSet& set) {
  Eigen::MatrixXd c(set.levels(), set.N0);
  for (int lv = 1; lv <= set.levels(); ++lv)
    for (int j = 0; j < set.N0; ++j)
      c(lv - 1, j) = oracle::dot_w(set.grid, f, synth_member(set, lv, j));
  return c;
}

/// Synthesis by the naive double sum over all members.
inline Field naive_inverse(const Eigen::MatrixXd& c, const cmpw::BcpwSet& set) {
  Field out = Field::Zero(set.grid.n);
  for (int lv = 1; lv <= static_cast<int>(c.rows()); ++lv)
    for (int j = 0; j < set.N0; ++j)
      out += c(lv - 1, j) * synth_member(set, lv, j);
  return out;
}

/// Riemann integral of the interior arch profile on a refined grid.
inline double arch_square_integral(double mu, double L, int samples) {
  const double lambda = std::pow(3.0 * M_PI, 0.4) * std::pow(mu, -0.8);
  const double half = M_PI / std::sqrt(lambda);
  const double h = L / samples;
  double acc = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = i * h;
    double d = std::abs(x - L / 2);
    if (d > half) continue;
    const double v = (1.0 + std::cos(std::sqrt(lambda) * (x - L / 2))) /
                     (lambda * mu);
    acc += v * v * h;
  }
  return acc;
}

/// Deterministic RNG shared by the tests.
inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Field random_field(const PeriodicGrid& g, std::uint64_t seed) {
  std::mt19937_64 r(seed);
  std::normal_distribution<double> nd;
  Field f(g.n);
  for (int i = 0; i < g.n; ++i) f[i] = nd(r);
  return f;
}

}  // namespace oracle
