#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cmpw/cpw_builder.hpp"

namespace cmpw {

/// Expansion coefficients f^n_j over levels n = 1..n_max (rows) and shifts
/// j = 0..N0-1 (columns).
struct CpwCoeffs {
  Eigen::MatrixXd values;
  double L = 0.0;
  double w = 0.0;
  int N0 = 0;
  int n_max = 0;
};

/// Cyclic node interval [start, start+length) on the grid.
struct Window {
  int start = 0;
  int length = 0;
};

/// Analysis f^n_j = <f, b^n_j> for the whole family, via one length-n
/// transform, per-level folding onto shift classes, and length-N0
/// transforms.
CpwCoeffs cpw_forward(const Field& f, const BcpwSet& basis);

/// Synthesis sum_{n,j} f^n_j b^n_j via the adjoint fast path.
Field cpw_inverse(const CpwCoeffs& c, const BcpwSet& basis);

/// Restriction of the synthesis to a window, touching only members whose
/// support intersects it. Returns win.length samples.
Field windowed_inverse(const CpwCoeffs& c, const BcpwSet& basis,
                       const Window& win);

struct PartialCoeffs {
  CpwCoeffs coeffs;
  /// Members (level, shift) whose support intersects the window; only these
  /// entries of coeffs are populated.
  std::vector<std::pair<int, int>> members;
};

/// Analysis of a field supported inside the window (given as win.length
/// samples), restricted to members intersecting the window.
PartialCoeffs windowed_forward(const Field& f_win, const BcpwSet& basis,
                               const Window& win);

enum class TopkBasis { Cpw, Fourier };

/// Weighted L2 error of reconstructing f from its K largest-magnitude
/// coefficients in the chosen orthonormal basis.
double topk_error(const Field& f, const BcpwSet& basis, TopkBasis which,
                  int k);

}  // namespace cmpw
