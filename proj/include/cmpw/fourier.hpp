#pragma once

#include <complex>

#include <Eigen/Core>

#include "cmpw/grid.hpp"

namespace cmpw {

using CVec = Eigen::VectorXcd;

/// Signed frequency index of DFT slot m on an n-point grid (m <= n/2 maps to
/// itself, higher slots alias to negative frequencies; Nyquist kept positive).
inline int signed_index(int m, int n) { return m <= n / 2 ? m : m - n; }

/// Angular frequency of slot m: G_m = 2*pi*signed_index(m)/L.
inline double freq(const PeriodicGrid& g, int m) {
  return 2.0 * M_PI * signed_index(m, g.n) / g.L;
}

/// In-place unnormalized DFT of length data.size(); forward uses the
/// e^{-iGx} kernel.
void fft(CVec& data, bool forward);

/// Orthonormal Fourier coordinates of a real field:
/// c_m = (dx/sqrt(L)) * sum_i u_i e^{-i G_m x_i}, so sum_m |c_m|^2 = <u,u>.
CVec spectrum(const PeriodicGrid& g, const Field& u);

/// Real part of the inverse map u_i = (1/sqrt(L)) * sum_m c_m e^{i G_m x_i}.
Field from_spectrum(const PeriodicGrid& g, const CVec& c);

/// Coordinates of a real field that is even about node 0, as a real vector
/// over the full DFT layout (entry m equals entry n-m). Tiny odd roundoff
/// components are projected out.
Eigen::VectorXd even_spectrum(const PeriodicGrid& g, const Field& u);

Field from_even_spectrum(const PeriodicGrid& g, const Eigen::VectorXd& c);

/// Samples of the trigonometric interpolant of u translated by s: u(x - s).
/// Exact for bandlimited data; s need not be a multiple of dx.
Field spectral_shift(const PeriodicGrid& g, const Field& u, double s);

}  // namespace cmpw
