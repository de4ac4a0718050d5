#pragma once

// Max-norm (gamma_2:l1->linf) and centralized max-norm of a real matrix by
// low-rank factorization Z = U V^T with penalty continuation:
//
//   minimize  softmax_beta(|U_1|^2,..,|U_n|^2,|V_1|^2,..,|V_m|^2)
//             + lambda * ||U V^T - Z||_F^2
//
// over a continuation ladder of (lambda, beta) stages, gradient descent with
// a Barzilai-Borwein step and Armijo backtracking inside each stage, an
// exact-fit polish (alternating ridge least squares) at the end, and a
// global row/column rescale that equalizes the two factor norms. At the
// default rank r = n+m the problem has no spurious local minima in practice;
// seeded restarts guard the rest. The returned t is always recomputed from
// the witness U, V, never from the smoothed objective.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "maxlsh/common.hpp"
#include "maxlsh/matrix.hpp"
#include "maxlsh/rng.hpp"
#include "maxlsh/simcore.hpp"

namespace maxlsh {

struct SolverConfig {
  int rank = 0;          // 0 means n+m
  int restarts = 8;
  std::uint64_t seed = 1;
  double fit_tol_factor = 1e-6;  // residual cap: factor * max(1, max|Z|)
  int max_iterations = 600;      // per continuation stage
  int polish_sweeps = 4;
  int golden_iterations = 60;    // centered variant's 1-D search
};

/// Witness factorization Z ~= U V^T with t = max squared row norm over both
/// factors and residual = max| U V^T - Z |.
struct Factorization {
  Matrix U, V;
  double t = 0.0;
  double residual = 0.0;
};

namespace detail {

struct Stage {
  double lambda;
  double beta_scale;  // beta = beta_scale / max|Z|
  double grad_tol;
};

inline std::vector<Stage> continuation_schedule(bool warm_start) {
  // lambda per the penalty ladder; beta sharpens alongside so the softmax
  // argmin tracks the true max within ~ln(n+m)/beta. A warm (spectral)
  // start already fits Z exactly and must not pass through the low-lambda
  // stages: there, dropping a weakly coupled direction is cheaper than
  // fitting it, and the mass never grows back.
  if (warm_start)
    return {{1e6, 50.0, 1e-8}, {1e6, 500.0, 1e-9}, {1e6, 5e3, 1e-10}, {1e6, 5e4, 1e-10}, {1e6, 5e5, 1e-10}};
  return {{1e2, 50.0, 1e-6}, {1e4, 500.0, 1e-8}, {1e6, 5e3, 1e-10}, {1e6, 5e4, 1e-10}, {1e6, 5e5, 1e-10}};
}

// Softmax of all squared row norms plus the fit penalty; gradients written
// into gu, gv.
inline double objective_and_gradient(const Matrix& u, const Matrix& v, const Matrix& z,
                                     double lambda, double beta, Matrix& gu, Matrix& gv,
                                     Matrix& scratch_e) {
  const int n = u.rows(), m = v.rows(), r = u.cols();
  // row norms and the stabilized softmax weights
  std::vector<double> sq(n + m);
  double top = -1e300;
  for (int i = 0; i < n; ++i) top = std::max(top, sq[i] = u.row_squared_norm(i));
  for (int j = 0; j < m; ++j) top = std::max(top, sq[n + j] = v.row_squared_norm(j));
  double sum_exp = 0.0;
  for (double s : sq) sum_exp += std::exp(beta * (s - top));
  const double smax = top + std::log(sum_exp) / beta;

  // residual E = U V^T - Z
  Matrix& e = scratch_e;
  double fit = 0.0;
  for (int i = 0; i < n; ++i) {
    const double* ui = u.row_ptr(i);
    for (int j = 0; j < m; ++j) {
      const double* vj = v.row_ptr(j);
      double s = 0.0;
      for (int k = 0; k < r; ++k) s += ui[k] * vj[k];
      const double d = s - z(i, j);
      e(i, j) = d;
      fit += d * d;
    }
  }

  // gradient: 2*w_i*U_i from the softmax, 2*lambda*(E V / E^T U) from the fit
  for (int i = 0; i < n; ++i) {
    const double w = std::exp(beta * (sq[i] - top)) / sum_exp;
    const double* ui = u.row_ptr(i);
    double* gi = gu.row_ptr(i);
    for (int k = 0; k < r; ++k) gi[k] = 2.0 * w * ui[k];
    for (int j = 0; j < m; ++j) {
      const double f = 2.0 * lambda * e(i, j);
      if (f == 0.0) continue;
      const double* vj = v.row_ptr(j);
      for (int k = 0; k < r; ++k) gi[k] += f * vj[k];
    }
  }
  for (int j = 0; j < m; ++j) {
    const double w = std::exp(beta * (sq[n + j] - top)) / sum_exp;
    const double* vj = v.row_ptr(j);
    double* gj = gv.row_ptr(j);
    for (int k = 0; k < r; ++k) gj[k] = 2.0 * w * vj[k];
    for (int i = 0; i < n; ++i) {
      const double f = 2.0 * lambda * e(i, j);
      if (f == 0.0) continue;
      const double* ui = u.row_ptr(i);
      for (int k = 0; k < r; ++k) gj[k] += f * ui[k];
    }
  }
  return smax + lambda * fit;
}

inline void gd_stage(Matrix& u, Matrix& v, const Matrix& z, double lambda, double beta,
                     double grad_tol, int max_iterations) {
  Matrix gu(u.rows(), u.cols()), gv(v.rows(), v.cols());
  Matrix gu_prev, gv_prev, u_prev, v_prev;
  Matrix e(z.rows(), z.cols());
  double f = objective_and_gradient(u, v, z, lambda, beta, gu, gv, e);
  double step = 1.0 / (4.0 * lambda * (1.0 + z.max_abs()));
  for (int it = 0; it < max_iterations; ++it) {
    double gnorm2 = 0.0;
    for (double g : gu.data()) gnorm2 += g * g;
    for (double g : gv.data()) gnorm2 += g * g;
    if (std::sqrt(gnorm2) <= grad_tol * (1.0 + std::abs(f))) break;

    // Barzilai-Borwein step guess from the previous move
    if (it > 0) {
      double sy = 0.0, yy = 0.0;
      for (std::size_t i = 0; i < u.data().size(); ++i) {
        const double s = u.data()[i] - u_prev.data()[i];
        const double y = gu.data()[i] - gu_prev.data()[i];
        sy += s * y;
        yy += y * y;
      }
      for (std::size_t i = 0; i < v.data().size(); ++i) {
        const double s = v.data()[i] - v_prev.data()[i];
        const double y = gv.data()[i] - gv_prev.data()[i];
        sy += s * y;
        yy += y * y;
      }
      if (sy > 1e-300 && yy > 1e-300) step = std::min(std::max(sy / yy, 1e-14), 1e6);
    }

    u_prev = u;
    v_prev = v;
    gu_prev = gu;
    gv_prev = gv;
    const double f0 = f;

    // Armijo backtracking from the BB guess
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      for (std::size_t i = 0; i < u.data().size(); ++i) u.data()[i] = u_prev.data()[i] - step * gu_prev.data()[i];
      for (std::size_t i = 0; i < v.data().size(); ++i) v.data()[i] = v_prev.data()[i] - step * gv_prev.data()[i];
      f = objective_and_gradient(u, v, z, lambda, beta, gu, gv, e);
      if (f <= f0 - 1e-4 * step * gnorm2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      u = u_prev;
      v = v_prev;
      gu = gu_prev;
      gv = gv_prev;
      f = f0;
      break;
    }
  }
}

// Symmetric positive definite solve via Cholesky with a diagonal ridge.
inline std::vector<double> cholesky_factor(Matrix a) {
  const int n = a.rows();
  std::vector<double> l(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      if (i == j) {
        if (s <= 0.0) throw SolverFailure("cholesky: matrix not positive definite", s);
        l[i * n + i] = std::sqrt(s);
      } else {
        l[i * n + j] = s / l[j * n + j];
      }
    }
  }
  return l;
}

inline void cholesky_solve_inplace(const std::vector<double>& l, int n, double* rhs) {
  for (int i = 0; i < n; ++i) {
    double s = rhs[i];
    for (int k = 0; k < i; ++k) s -= l[i * n + k] * rhs[k];
    rhs[i] = s / l[i * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = rhs[i];
    for (int k = i + 1; k < n; ++k) s -= l[k * n + i] * rhs[k];
    rhs[i] = s / l[i * n + i];
  }
}

// Alternating ridge least squares drives the fit residual to ~machine level
// while moving the near-optimal factors as little as possible (ridge keeps
// the correction minimum-norm on the factors' null space).
inline void exact_fit_polish(Matrix& u, Matrix& v, const Matrix& z, int sweeps) {
  const int n = u.rows(), m = v.rows(), r = u.cols();
  // ridge relative to the factor scale keeps the correction minimum-norm
  // without drowning tiny-scale problems
  auto rel_ridge = [r](const Matrix& gram) {
    double tr = 0.0;
    for (int k = 0; k < r; ++k) tr += gram(k, k);
    return 1e-11 * (tr / r) + 1e-300;
  };
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    // V <- argmin ||U V^T - Z||: solve (U^T U + ridge I) X = U^T Z
    Matrix gram = u.transpose().matmul(u);
    const double ridge = rel_ridge(gram);
    for (int k = 0; k < r; ++k) gram(k, k) += ridge;
    auto l = cholesky_factor(gram);
    for (int j = 0; j < m; ++j) {
      std::vector<double> rhs(r, 0.0);
      for (int i = 0; i < n; ++i) {
        const double zij = z(i, j);
        const double* ui = u.row_ptr(i);
        for (int k = 0; k < r; ++k) rhs[k] += ui[k] * zij;
      }
      cholesky_solve_inplace(l, r, rhs.data());
      double* vj = v.row_ptr(j);
      for (int k = 0; k < r; ++k) vj[k] = rhs[k];
    }
    // U <- argmin ||U V^T - Z||
    gram = v.transpose().matmul(v);
    const double ridge_u = rel_ridge(gram);
    for (int k = 0; k < r; ++k) gram(k, k) += ridge_u;
    l = cholesky_factor(gram);
    for (int i = 0; i < n; ++i) {
      std::vector<double> rhs(r, 0.0);
      for (int j = 0; j < m; ++j) {
        const double zij = z(i, j);
        const double* vj = v.row_ptr(j);
        for (int k = 0; k < r; ++k) rhs[k] += vj[k] * zij;
      }
      cholesky_solve_inplace(l, r, rhs.data());
      double* ui = u.row_ptr(i);
      for (int k = 0; k < r; ++k) ui[k] = rhs[k];
    }
  }
}

inline double max_row_squared_norm(const Matrix& a) {
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i) s = std::max(s, a.row_squared_norm(i));
  return s;
}

// U V^T is invariant under U *= g, V /= g; pick g so both factor norms meet
// at sqrt(maxU * maxV), which is the best t this witness supports.
inline void balance_factors(Matrix& u, Matrix& v) {
  const double mu = max_row_squared_norm(u);
  const double mv = max_row_squared_norm(v);
  if (mu <= 0.0 || mv <= 0.0) return;
  const double g = std::pow(mv / mu, 0.25);
  u *= g;
  v *= 1.0 / g;
}

// Spectral warm start: the balanced SVD factorization U = A sqrt(S),
// V = B sqrt(S) reproduces Z exactly with every direction already carrying
// its mass, so gradient descent only has to trade row norms. Random inits
// die on instances with weakly coupled directions (the fit gradient through
// a missing direction is zero); this one cannot.
inline void svd_init(Matrix& u, Matrix& v, const Matrix& z) {
  const int n = z.rows(), m = z.cols();
  Matrix sym(n + m, n + m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      sym(i, n + j) = z(i, j);
      sym(n + j, i) = z(i, j);
    }
  Matrix vecs;
  std::vector<double> vals = jacobi_eigen(std::move(sym), &vecs);
  const double cutoff = 1e-13 * z.max_abs();
  u *= 0.0;
  v *= 0.0;
  int col = 0;
  for (std::size_t i = 0; i < vals.size() && col < u.cols(); ++i) {
    if (vals[i] <= cutoff) continue;
    const double scale = std::sqrt(2.0 * vals[i]);
    for (int x = 0; x < n; ++x) u(x, col) = scale * vecs(x, i);
    for (int y = 0; y < m; ++y) v(y, col) = scale * vecs(n + y, i);
    ++col;
  }
}

inline double max_abs_residual(const Matrix& u, const Matrix& v, const Matrix& z) {
  double worst = 0.0;
  for (int i = 0; i < z.rows(); ++i)
    for (int j = 0; j < z.cols(); ++j) {
      const double* ui = u.row_ptr(i);
      const double* vj = v.row_ptr(j);
      double s = 0.0;
      for (int k = 0; k < u.cols(); ++k) s += ui[k] * vj[k];
      worst = std::max(worst, std::abs(s - z(i, j)));
    }
  return worst;
}

}  // namespace detail

/// Best factorization over config.restarts seeded restarts; t is an upper
/// estimate of ||Z||_max and always at least max|Z_ij| - 1e-9.
///
/// The solve runs on the canonical instance s Z / max|Z| (s the sign of the
/// first nonzero entry): max-norm is absolutely homogeneous, so this loses
/// nothing, keeps the continuation constants meaningful at every input
/// scale, and makes max_norm(c Z) = |c| max_norm(Z) hold by construction.
inline Factorization max_norm(const SimMatrix& zin, const SolverConfig& cfg = {}) {
  const int n = zin.rows(), m = zin.cols();
  const double zmax_orig = zin.values.max_abs();
  const int r = cfg.rank > 0 ? cfg.rank : n + m;
  if (r < 1) throw std::invalid_argument("max_norm: rank must be >= 1");

  if (zmax_orig == 0.0) return Factorization{Matrix(n, r), Matrix(m, r), 0.0, 0.0};

  double lead_sign = 1.0;
  for (double v : zin.values.data())
    if (v != 0.0) {
      lead_sign = v > 0.0 ? 1.0 : -1.0;
      break;
    }
  Matrix z = zin.values;
  z *= lead_sign / zmax_orig;
  const double zmax = 1.0;

  // tolerances live on the original scale
  const double fit_tol = cfg.fit_tol_factor * std::max(1.0, zmax_orig) / zmax_orig;
  const double lower_slack = 1e-9 / zmax_orig;
  std::optional<Factorization> best;
  double best_infeasible_residual = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < cfg.restarts; ++restart) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(restart));
    const double init_scale = std::sqrt(zmax / r);
    Matrix u(n, r), v(m, r);
    if (restart == 0) {
      detail::svd_init(u, v, z);
      // faint noise keeps the unused columns reachable
      for (double& x : u.data()) x += 1e-7 * init_scale * rng.gaussian();
      for (double& x : v.data()) x += 1e-7 * init_scale * rng.gaussian();
    } else {
      for (double& x : u.data()) x = init_scale * rng.gaussian();
      for (double& x : v.data()) x = init_scale * rng.gaussian();
    }

    const auto schedule = detail::continuation_schedule(restart == 0);
    for (std::size_t si = 0; si < schedule.size(); ++si) {
      detail::gd_stage(u, v, z, schedule[si].lambda, schedule[si].beta_scale / zmax,
                       schedule[si].grad_tol, cfg.max_iterations);
      if (si + 1 < schedule.size()) {
        // kick off any saddle: a residual component orthogonal to the factor
        // span has zero gradient until some mass enters that direction
        const double kick = 1e-4 * init_scale;
        for (double& x : u.data()) x += kick * rng.gaussian();
        for (double& x : v.data()) x += kick * rng.gaussian();
      }
    }

    // exact-fit polish, guarded: keep it only if it actually helps
    Matrix up = u, vp = v;
    try {
      detail::exact_fit_polish(up, vp, z, cfg.polish_sweeps);
      const double res_before = detail::max_abs_residual(u, v, z);
      const double res_after = detail::max_abs_residual(up, vp, z);
      const double t_before = std::sqrt(detail::max_row_squared_norm(u)) *
                              std::sqrt(detail::max_row_squared_norm(v));
      const double t_after = std::sqrt(detail::max_row_squared_norm(up)) *
                             std::sqrt(detail::max_row_squared_norm(vp));
      if (res_after < res_before && t_after <= t_before + 10.0 * res_before + 1e-12) {
        u = std::move(up);
        v = std::move(vp);
      }
    } catch (const SolverFailure&) {
      // ridge system went degenerate; keep the unpolished factors
    }

    detail::balance_factors(u, v);
    Factorization cand;
    cand.t = detail::max_row_squared_norm(u);  // == that of V after balancing
    cand.residual = detail::max_abs_residual(u, v, z);
    cand.U = std::move(u);
    cand.V = std::move(v);

    // a valid witness fits Z and cannot undercut the entrywise lower bound
    // (the fit tolerance alone is vacuous when max|Z| << 1)
    if (cand.residual <= fit_tol && cand.t >= zmax - lower_slack) {
      if (!best || cand.t < best->t) best = std::move(cand);
    } else {
      best_infeasible_residual = std::min(best_infeasible_residual, cand.residual * zmax_orig);
    }
  }

  if (!best)
    throw SolverFailure("max_norm: no restart reached fit tolerance", best_infeasible_residual);

  // undo the canonicalization: Z = s zmax (U V^T) with the sign folded into V
  const double unscale = std::sqrt(zmax_orig);
  best->U *= unscale;
  best->V *= lead_sign * unscale;
  best->t *= zmax_orig;
  best->residual *= zmax_orig;
  return *best;
}

/// Centralized max-norm min_theta ||Z - theta||_max; value/theta from a
/// golden-section search over the (convex) shift.
struct CenteredMaxNorm {
  double value = 0.0;
  double theta = 0.0;
  Factorization inner;  // witness for Z - theta
};

inline CenteredMaxNorm centered_max_norm(const SimMatrix& zin, const SolverConfig& cfg = {}) {
  const Matrix& z = zin.values;
  double lo = 1e300, hi = -1e300;
  for (double v : z.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  lo -= 1.0;
  hi += 1.0;

  // coarse probes shrink the bracket fast; the last stretch runs at full
  // quality so probe noise near the flat minimum cannot misplace theta
  SolverConfig coarse = cfg;
  coarse.restarts = std::max(2, cfg.restarts / 4);

  auto value_at = [&](double theta, const SolverConfig& conf) {
    Matrix shifted = z;
    for (double& v : shifted.data()) v -= theta;
    return max_norm(SimMatrix(std::move(shifted)), conf).t;
  };

  const int fine_from = 2 * cfg.golden_iterations / 3;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = value_at(x1, coarse), f2 = value_at(x2, coarse);
  for (int it = 0; it < cfg.golden_iterations; ++it) {
    const SolverConfig& conf = it >= fine_from ? cfg : coarse;
    if (it == fine_from) {
      f1 = value_at(x1, cfg);
      f2 = value_at(x2, cfg);
    }
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = value_at(x1, conf);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = value_at(x2, conf);
    }
  }
  const double theta = f1 <= f2 ? x1 : x2;

  Matrix shifted = z;
  for (double& v : shifted.data()) v -= theta;
  CenteredMaxNorm out;
  out.inner = max_norm(SimMatrix(std::move(shifted)), cfg);
  out.value = out.inner.t;
  out.theta = theta;
  return out;
}

/// Entrywise upper bound min(n,m) * (max|Z|)^2 on the max-norm, with the
/// sqrt(min(n,m)) * max|Z| alternative reading reported alongside.
struct EntryRankBound {
  double bound = 0.0;
  double sqrt_rank_alternative = 0.0;
};

inline EntryRankBound rank_entry_bound(const SimMatrix& z) {
  const double zmax = z.values.max_abs();
  const double r = std::min(z.rows(), z.cols());
  return EntryRankBound{r * zmax * zmax, std::sqrt(r) * zmax};
}

}  // namespace maxlsh
