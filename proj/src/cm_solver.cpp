#include "cmpw/cm_solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cmpw/errors.hpp"

namespace cmpw {

namespace {

constexpr double kBandedTol = 1e-8;
constexpr int kBandedSweepCap = 200;

Eigen::MatrixXd loewdin(const PeriodicGrid& grid, const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd gram = grid.dx * (a.transpose() * a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  require(es.info() == Eigen::Success, Err::RankDeficient,
          "gram eigendecomposition failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  require(ev[ev.size() - 1] > 0.0 && ev[0] >= 1e-12 * ev[ev.size() - 1],
          Err::RankDeficient, "columns are numerically rank deficient");
  const Eigen::MatrixXd& u = es.eigenvectors();
  return a * (u * ev.cwiseSqrt().cwiseInverse().asDiagonal() * u.transpose());
}

double banded_residual(const PeriodicGrid& grid, const Eigen::MatrixXd& a,
                       int p) {
  const int nc = static_cast<int>(a.cols());
  double worst = 0.0;
  for (int j = 0; j < nc; ++j)
    for (int k = j; k < nc; ++k) {
      const int d = std::min(k - j, nc - (k - j));
      if (d > p) continue;
      const double g = grid.dx * a.col(j).dot(a.col(k)) - (j == k ? 1.0 : 0.0);
      worst = std::max(worst, std::abs(g));
    }
  return worst;
}

void gauss_seidel(const HamiltonianOp& op, double shift,
                  const Eigen::VectorXd& rhs, Eigen::Ref<Eigen::VectorXd> x,
                  int sweeps) {
  const int n = op.grid.n;
  const double k = 1.0 / (op.grid.dx * op.grid.dx);
  const Field& v = op.potential.values;
  for (int s = 0; s < sweeps; ++s)
    for (int i = 0; i < n; ++i) {
      const double nb = x[i == 0 ? n - 1 : i - 1] + x[i == n - 1 ? 0 : i + 1];
      x[i] = (rhs[i] + k * nb) / (2.0 * k + 2.0 * v[i] + shift);
    }
}

void conjugate_gradient(const HamiltonianOp& op, double shift,
                        const Eigen::VectorXd& rhs,
                        Eigen::Ref<Eigen::VectorXd> x, double tol) {
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    x.setZero();
    return;
  }
  auto matvec = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    return 2.0 * op.apply(u) + shift * u;
  };
  Eigen::VectorXd r = rhs - matvec(x);
  Eigen::VectorXd p = r;
  double rr = r.squaredNorm();
  const int cap = 5 * op.grid.n;
  for (int it = 0; it < cap; ++it) {
    if (std::sqrt(rr) <= tol * rhs_norm) return;
    const Eigen::VectorXd ap = matvec(p);
    const double pap = p.dot(ap);
    require(pap > 0.0, Err::IndefiniteSystem,
            "inner system lost positive definiteness");
    const double alpha = rr / pap;
    x += alpha * p;
    r -= alpha * ap;
    const double rr_new = r.squaredNorm();
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  require(std::sqrt(rr) <= tol * rhs_norm, Err::InnerSolverStall,
          "conjugate gradient did not reach tolerance");
}

void check_definiteness(const HamiltonianOp& op, double shift) {
  require(shift > std::max(0.0, -2.0 * op.min_potential()),
          Err::IndefiniteSystem,
          "penalty weights too small for the potential depth");
}

Eigen::VectorXd column_centroids(const PeriodicGrid& grid,
                                 const Eigen::MatrixXd& a) {
  Eigen::VectorXd c(a.cols());
  for (int j = 0; j < a.cols(); ++j)
    c[j] = circular_centroid(grid, a.col(j).cwiseAbs2());
  return c;
}

}  // namespace

Eigen::MatrixXd shrink(const Eigen::MatrixXd& u, double delta) {
  require(delta >= 0.0 && std::isfinite(delta), Err::NegativeThreshold,
          "shrink threshold must be nonnegative");
  return u.array().sign() * (u.array().abs() - delta).max(0.0);
}

Eigen::MatrixXd orthonormal_projection(const PeriodicGrid& grid,
                                       const Eigen::MatrixXd& a) {
  require(a.rows() == grid.n && a.cols() >= 1, Err::LengthMismatch,
          "matrix shape incompatible with grid");
  return loewdin(grid, a);
}

Eigen::MatrixXd banded_orthonormalize(const PeriodicGrid& grid,
                                      const Eigen::MatrixXd& a, int p) {
  require(a.rows() == grid.n && a.cols() >= 1, Err::LengthMismatch,
          "matrix shape incompatible with grid");
  require(p >= 1, Err::ConfigInvalid, "band width must be at least 1");
  const int nc = static_cast<int>(a.cols());
  if (p >= nc / 2) return orthonormal_projection(grid, a);

  Eigen::MatrixXd out = a;
  const double r0 = banded_residual(grid, out, p);
  if (r0 <= kBandedTol) return out;
  double r = r0;
  for (int sweep = 0; sweep < kBandedSweepCap; ++sweep) {
    for (int j = 0; j < nc; ++j) {
      const int width = 2 * p + 1;
      Eigen::MatrixXd block(out.rows(), width);
      for (int t = 0; t < width; ++t)
        block.col(t) = out.col(((j - p + t) % nc + nc) % nc);
      out.col(j) = loewdin(grid, block).col(p);
    }
    r = banded_residual(grid, out, p);
    if (r <= kBandedTol) return out;
  }
  fail(Err::SweepDivergence,
       "banded residual " + std::to_string(r) + " after sweep cap (started at " +
           std::to_string(r0) + ")");
}

Eigen::MatrixXd psi_update(const HamiltonianOp& op, const SocState& state,
                           const SolveOptions& opts) {
  require(state.lambda_pen > 0.0 && state.r_pen > 0.0, Err::IndefiniteSystem,
          "penalty weights must be positive");
  const double shift = state.lambda_pen + state.r_pen;
  check_definiteness(op, shift);
  const Eigen::MatrixXd rhs = state.r_pen * (state.P - state.B) +
                              state.lambda_pen * (state.Q - state.b);
  require(rhs.rows() == op.grid.n, Err::LengthMismatch,
          "state shape incompatible with grid");
  Eigen::MatrixXd x = state.Psi;
  const bool use_gs = op.stencil == KineticStencil::SecondOrderFD &&
                      opts.cg_tol <= 0.0 && opts.gs_sweeps > 0;
  for (int j = 0; j < rhs.cols(); ++j) {
    Eigen::VectorXd col = x.col(j);
    if (use_gs)
      gauss_seidel(op, shift, rhs.col(j), col, opts.gs_sweeps);
    else
      conjugate_gradient(op, shift, rhs.col(j), col,
                         opts.cg_tol > 0.0 ? opts.cg_tol : 1e-10);
    x.col(j) = col;
  }
  return x;
}

double cm_objective(const HamiltonianOp& op, const Eigen::MatrixXd& modes,
                    double mu) {
  double e = 0.0;
  for (int j = 0; j < modes.cols(); ++j) {
    const Field psi = modes.col(j);
    e += norm1_w(op.grid, psi) / mu + dot_w(op.grid, psi, op.apply(psi));
  }
  return e;
}

void canonicalize_signs(const PeriodicGrid& grid, Eigen::MatrixXd& modes) {
  for (int j = 0; j < modes.cols(); ++j)
    if (grid.dx * modes.col(j).sum() < 0.0) modes.col(j) *= -1.0;
}

SolveResult solve_cm(const HamiltonianOp& op, int n_modes, double mu,
                     const SolveOptions& opts) {
  const int n = op.grid.n;
  require(n_modes >= 1 && n_modes <= n, Err::ConfigInvalid,
          "mode count outside [1, n]");
  require(mu > 0.0 && std::isfinite(mu), Err::ConfigInvalid,
          "sparsity weight must be positive");

  SocState st;
  // Default penalties follow the mu*N/20 and mu*N/5 rule, floored so the
  // soft-threshold 1/(lambda*mu) stays below the amplitude of a localized
  // mode; without the floor the threshold exceeds the whole mode for small
  // mu and the sparsity step zeroes every iterate.
  st.lambda_pen = opts.lambda_pen > 0.0
                      ? opts.lambda_pen
                      : std::max(mu * n_modes / 20.0, 8.0 / mu);
  st.r_pen = opts.r_pen > 0.0 ? opts.r_pen
                              : std::max(mu * n_modes / 5.0, 32.0 / mu);
  check_definiteness(op, st.lambda_pen + st.r_pen);

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd init(n, n_modes);
  for (int j = 0; j < n_modes; ++j)
    for (int i = 0; i < n; ++i) init(i, j) = gauss(rng);
  st.Psi = orthonormal_projection(op.grid, init);
  st.Q = st.Psi;
  st.P = st.Psi;
  st.b = Eigen::MatrixXd::Zero(n, n_modes);
  st.B = Eigen::MatrixXd::Zero(n, n_modes);

  const double scale = std::sqrt(static_cast<double>(n) * n_modes);
  const double shrink_delta = 1.0 / (st.lambda_pen * mu);
  double obj = cm_objective(op, st.Psi, mu);
  bool converged = false;
  int consec = 0;

  for (int k = 1; k <= opts.max_iter; ++k) {
    st.iter = k;
    st.Psi = psi_update(op, st, opts);
    st.Q = shrink(st.Psi + st.b, shrink_delta);

    const Eigen::MatrixXd m = st.Psi + st.B;
    if (opts.band_p > 0 && opts.band_p < n_modes / 2) {
      const Eigen::VectorXd cent = column_centroids(op.grid, m);
      std::vector<int> perm(n_modes);
      std::iota(perm.begin(), perm.end(), 0);
      std::stable_sort(perm.begin(), perm.end(),
                       [&](int x, int y) { return cent[x] < cent[y]; });
      Eigen::MatrixXd mp(n, n_modes);
      for (int j = 0; j < n_modes; ++j) mp.col(j) = m.col(perm[j]);
      const Eigen::MatrixXd pp =
          banded_orthonormalize(op.grid, mp, opts.band_p);
      for (int j = 0; j < n_modes; ++j) st.P.col(perm[j]) = pp.col(j);
    } else {
      st.P = orthonormal_projection(op.grid, m);
    }

    st.b += st.Psi - st.Q;
    st.B += st.Psi - st.P;

    const double rq = (st.Psi - st.Q).norm() / scale;
    const double rp = (st.Psi - st.P).norm() / scale;
    const double obj_new = cm_objective(op, st.Psi, mu);
    const double rel = std::abs(obj_new - obj) / std::max(1.0, std::abs(obj));
    obj = obj_new;
    st.split_q.push_back(rq);
    st.split_p.push_back(rp);
    st.objective_hist.push_back(obj);

    consec = rel <= opts.tol_obj ? consec + 1 : 0;
    if (std::max(rq, rp) <= opts.tol_split && consec >= opts.obj_window) {
      converged = true;
      break;
    }
  }

  if (!converged && opts.strict)
    fail(Err::MaxIterExceeded,
         "split residuals did not converge in " +
             std::to_string(opts.max_iter) + " iterations");
  if (converged)
    for (int j = 0; j < n_modes; ++j)
      require(st.Q.col(j).cwiseAbs().maxCoeff() > 0.0, Err::ZeroModeCollapse,
              "a mode was shrunk to zero; decrease mu or the mode count");

  Eigen::MatrixXd final_modes = orthonormal_projection(op.grid, st.Psi);
  Eigen::VectorXd ray(n_modes);
  for (int j = 0; j < n_modes; ++j) {
    const Field psi = final_modes.col(j);
    ray[j] = dot_w(op.grid, psi, op.apply(psi));
  }
  std::vector<int> order(n_modes);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return ray[x] < ray[y]; });
  Eigen::MatrixXd sorted(n, n_modes);
  for (int j = 0; j < n_modes; ++j) sorted.col(j) = final_modes.col(order[j]);
  canonicalize_signs(op.grid, sorted);

  ModeSet ms;
  ms.grid = op.grid;
  ms.modes = sorted;
  ms.mu = mu;
  ms.objective = cm_objective(op, sorted, mu);
  return SolveResult{std::move(ms), std::move(st), converged};
}

double closed_form_lambda(double mu) {
  require(mu > 0.0 && std::isfinite(mu), Err::ConfigInvalid,
          "sparsity weight must be positive");
  return std::pow(3.0 * M_PI, 0.4) * std::pow(mu, -0.8);
}

double closed_form_halfwidth(double mu) {
  return M_PI / std::sqrt(closed_form_lambda(mu));
}

double closed_form_psi1(double mu, double L, double x) {
  require(L > 0.0 && std::isfinite(L), Err::NonPositiveLength,
          "domain length must be positive");
  const double lam = closed_form_lambda(mu);
  const double l = M_PI / std::sqrt(lam);
  require(2.0 * l < L, Err::SupportExceedsDomain,
          "mode support does not fit in the domain");
  double d = x - L / 2.0;
  d -= L * std::floor(d / L + 0.5);
  if (std::abs(d) > l) return 0.0;
  return (1.0 + std::cos(std::sqrt(lam) * d)) / (lam * mu);
}

Field sample_closed_form_psi1(double mu, const PeriodicGrid& grid) {
  Field out(grid.n);
  for (int i = 0; i < grid.n; ++i)
    out[i] = closed_form_psi1(mu, grid.L, grid.node(i));
  return out;
}

double circular_centroid(const PeriodicGrid& grid, const Field& weights) {
  require(static_cast<int>(weights.size()) == grid.n, Err::LengthMismatch,
          "weight length != grid size");
  double c = 0.0, s = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    const double th = 2.0 * M_PI * grid.node(i) / grid.L;
    c += weights[i] * std::cos(th);
    s += weights[i] * std::sin(th);
  }
  if (c == 0.0 && s == 0.0) return 0.0;
  double x = grid.L * std::atan2(s, c) / (2.0 * M_PI);
  if (x < 0.0) x += grid.L;
  return x;
}

double support_measure(const PeriodicGrid& grid, const Field& u,
                       double thresh) {
  require(static_cast<int>(u.size()) == grid.n, Err::LengthMismatch,
          "field length != grid size");
  require(thresh >= 0.0, Err::NegativeThreshold,
          "support threshold must be nonnegative");
  int count = 0;
  for (int i = 0; i < grid.n; ++i)
    if (std::abs(u[i]) > thresh) ++count;
  return count * grid.dx;
}

}  // namespace cmpw
