#include "cmpw/cpw_transform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "cmpw/errors.hpp"

namespace cmpw {

namespace {

int shift_class(int m, int n, int n0) {
  return ((signed_index(m, n) % n0) + n0) % n0;
}

void check_basis(const BcpwSet& basis) {
  require(basis.levels() >= 1, Err::LevelMissing, "no levels built");
}

void check_shape(const CpwCoeffs& c, const BcpwSet& basis) {
  require(c.values.rows() == c.n_max && c.values.cols() == c.N0 &&
              c.n_max >= 1,
          Err::ShapeMismatch, "coefficient block shape mismatch");
  require(c.N0 == basis.N0 && c.n_max <= basis.levels() &&
              std::abs(c.L - basis.grid.L) <= 1e-9 * basis.grid.L &&
              std::abs(c.w - basis.w) <= 1e-9 * basis.w,
          Err::ShapeMismatch, "coefficients built for a different basis");
  require(c.values.allFinite(), Err::ShapeMismatch,
          "coefficients contain non-finite entries");
}

int check_window(const Window& win, int n) {
  require(win.length >= 1 && win.length <= n, Err::EmptyWindow,
          "window length outside [1, n]");
  return ((win.start % n) + n) % n;
}

bool cyclic_contains(double s, double len, double x, double L) {
  double d = x - s;
  d -= L * std::floor(d / L);
  return d <= len + 1e-9 * L;
}

bool intervals_intersect(double s1, double l1, double s2, double l2,
                         double L) {
  return cyclic_contains(s1, l1, s2, L) || cyclic_contains(s2, l2, s1, L);
}

// Members are judged active inside a window one shift period beyond it, so
// interpolation tails of skipped members stay far below the agreement
// tolerances.
std::vector<std::pair<int, int>> active_members(const BcpwSet& basis,
                                                double win_start,
                                                double win_len, int n_max) {
  const double pad = basis.w;
  std::vector<std::pair<int, int>> out;
  for (int lvl = 1; lvl <= n_max; ++lvl)
    for (int j = 0; j < basis.N0; ++j) {
      const auto [ms, ml] = basis.member_support(lvl, j);
      if (intervals_intersect(ms - pad, ml + 2.0 * pad, win_start, win_len,
                              basis.grid.L))
        out.emplace_back(lvl, j);
    }
  return out;
}

}  // namespace

CpwCoeffs cpw_forward(const Field& f, const BcpwSet& basis) {
  check_basis(basis);
  const PeriodicGrid& g = basis.grid;
  require(static_cast<int>(f.size()) == g.n, Err::GridMismatch,
          "field length != grid size");
  const CVec F = spectrum(g, f);
  CpwCoeffs out;
  out.L = g.L;
  out.w = basis.w;
  out.N0 = basis.N0;
  out.n_max = basis.levels();
  out.values.resize(out.n_max, out.N0);
  for (int lvl = 1; lvl <= out.n_max; ++lvl) {
    const Eigen::VectorXd& beta = basis.fourier[lvl - 1];
    CVec zeta = CVec::Zero(out.N0);
    for (int m = 0; m < g.n; ++m)
      zeta[shift_class(m, g.n, out.N0)] += std::conj(F[m]) * beta[m];
    fft(zeta, true);
    out.values.row(lvl - 1) = zeta.real().transpose();
  }
  return out;
}

Field cpw_inverse(const CpwCoeffs& c, const BcpwSet& basis) {
  check_basis(basis);
  check_shape(c, basis);
  const PeriodicGrid& g = basis.grid;
  CVec xi = CVec::Zero(g.n);
  for (int lvl = 1; lvl <= c.n_max; ++lvl) {
    CVec row = c.values.row(lvl - 1).transpose().cast<std::complex<double>>();
    fft(row, true);
    const Eigen::VectorXd& beta = basis.fourier[lvl - 1];
    for (int m = 0; m < g.n; ++m)
      xi[m] += beta[m] * row[shift_class(m, g.n, c.N0)];
  }
  return from_spectrum(g, xi);
}

Field windowed_inverse(const CpwCoeffs& c, const BcpwSet& basis,
                       const Window& win) {
  check_basis(basis);
  check_shape(c, basis);
  const PeriodicGrid& g = basis.grid;
  const int start = check_window(win, g.n);
  const double ws = g.node(start) - 0.5 * g.dx;
  const double wl = win.length * g.dx;
  Field out = Field::Zero(win.length);
  for (const auto& [lvl, j] : active_members(basis, ws, wl, c.n_max)) {
    const double coeff = c.values(lvl - 1, j);
    if (coeff == 0.0) continue;
    const Field mem = basis.member(lvl, j);
    for (int t = 0; t < win.length; ++t)
      out[t] += coeff * mem[(start + t) % g.n];
  }
  return out;
}

PartialCoeffs windowed_forward(const Field& f_win, const BcpwSet& basis,
                               const Window& win) {
  check_basis(basis);
  const PeriodicGrid& g = basis.grid;
  const int start = check_window(win, g.n);
  require(static_cast<int>(f_win.size()) == win.length, Err::GridMismatch,
          "windowed field length != window length");
  const double ws = g.node(start) - 0.5 * g.dx;
  const double wl = win.length * g.dx;

  PartialCoeffs out;
  out.coeffs.L = g.L;
  out.coeffs.w = basis.w;
  out.coeffs.N0 = basis.N0;
  out.coeffs.n_max = basis.levels();
  out.coeffs.values = Eigen::MatrixXd::Zero(basis.levels(), basis.N0);
  out.members = active_members(basis, ws, wl, basis.levels());
  for (const auto& [lvl, j] : out.members) {
    const Field mem = basis.member(lvl, j);
    double acc = 0.0;
    for (int t = 0; t < win.length; ++t)
      acc += f_win[t] * mem[(start + t) % g.n];
    out.coeffs.values(lvl - 1, j) = g.dx * acc;
  }
  return out;
}

double topk_error(const Field& f, const BcpwSet& basis, TopkBasis which,
                  int k) {
  check_basis(basis);
  const PeriodicGrid& g = basis.grid;
  require(static_cast<int>(f.size()) == g.n, Err::GridMismatch,
          "field length != grid size");

  if (which == TopkBasis::Cpw) {
    CpwCoeffs c = cpw_forward(f, basis);
    const int total = c.n_max * c.N0;
    require(k >= 1 && k <= total, Err::KTooLarge,
            "kept count outside [1, basis size]");
    std::vector<int> idx(total);
    std::iota(idx.begin(), idx.end(), 0);
    auto value = [&](int i) {
      return std::abs(c.values(i / c.N0, i % c.N0));
    };
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return value(a) > value(b); });
    Eigen::MatrixXd kept = Eigen::MatrixXd::Zero(c.n_max, c.N0);
    for (int t = 0; t < k; ++t)
      kept(idx[t] / c.N0, idx[t] % c.N0) = c.values(idx[t] / c.N0,
                                                    idx[t] % c.N0);
    c.values = kept;
    return norm_w(g, f - cpw_inverse(c, basis));
  }

  require(k >= 1 && k <= g.n, Err::KTooLarge,
          "kept count outside [1, grid size]");
  const CVec c = spectrum(g, f);
  const int half = g.n / 2;
  // Real orthonormal coefficient list in index order: DC, then
  // (cos_m, sin_m) pairs, then the Nyquist mode.
  std::vector<double> coef(g.n);
  coef[0] = c[0].real();
  for (int m = 1; m < half; ++m) {
    coef[2 * m - 1] = std::sqrt(2.0) * c[m].real();
    coef[2 * m] = -std::sqrt(2.0) * c[m].imag();
  }
  coef[g.n - 1] = c[half].real();
  std::vector<int> idx(g.n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(coef[a]) > std::abs(coef[b]);
  });
  CVec rec = CVec::Zero(g.n);
  for (int t = 0; t < k; ++t) {
    const int i = idx[t];
    const double v = coef[i];
    if (i == 0) {
      rec[0] += v;
    } else if (i == g.n - 1) {
      rec[half] += v;
    } else if (i % 2 == 1) {
      const int m = (i + 1) / 2;
      rec[m] += v / std::sqrt(2.0);
      rec[g.n - m] += v / std::sqrt(2.0);
    } else {
      const int m = i / 2;
      rec[m] += std::complex<double>(0.0, -v / std::sqrt(2.0));
      rec[g.n - m] += std::complex<double>(0.0, v / std::sqrt(2.0));
    }
  }
  return norm_w(g, f - from_spectrum(g, rec));
}

}  // namespace cmpw
