#pragma once

// Dense two-phase revised simplex for equality-form linear programs:
//
//   minimize c.x   subject to  A x = b,  x >= 0
//
// Sized for this library's workloads (tens of rows, up to a few tens of
// thousands of columns). The basis inverse is kept explicitly and rebuilt
// periodically; pricing is Dantzig with a permanent switch to Bland's rule
// once the objective stalls, which prevents cycling on degenerate bases.

#include <cmath>
#include <limits>
#include <vector>

#include "maxlsh/common.hpp"
#include "maxlsh/matrix.hpp"

namespace maxlsh {

struct LpOptions {
  double pivot_tol = 1e-9;
  int max_iterations = 200000;
  int refactor_every = 64;
  int stall_limit = 64;  // non-improving pivots before Bland's rule kicks in
};

struct LpSolution {
  Status status = Status::solver_failure;
  double objective = 0.0;
  std::vector<double> x;     // primal values, one per column
  std::vector<double> dual;  // simplex multipliers, one per row
  int iterations = 0;
};

namespace detail {

class SimplexCore {
 public:
  // Column-major constraint matrix; b must already be nonnegative.
  SimplexCore(const std::vector<std::vector<double>>& cols, std::vector<double> b, LpOptions opt)
      : cols_(cols), b_(std::move(b)), opt_(opt), m_(static_cast<int>(b_.size())) {
    n_ = static_cast<int>(cols_.size());
    basis_.resize(m_);
    binv_ = Matrix::identity(m_);
    xb_ = b_;
    for (int i = 0; i < m_; ++i) basis_[i] = n_ + i;  // artificials
  }

  // Runs one phase with the given objective. Artificial variables start in
  // the basis and may leave but never re-enter. Returns false on
  // iteration-limit or an unbounded ray.
  bool run(const std::vector<double>& cost, int& iterations) {
    bool bland = false;
    int stall = 0;
    double best_obj = std::numeric_limits<double>::infinity();
    for (; iterations < opt_.max_iterations; ++iterations) {
      if (iterations > 0 && iterations % opt_.refactor_every == 0) refactor(cost);
      std::vector<double> y = duals(cost);

      int enter = -1;
      if (bland) {
        for (int j = 0; j < n_; ++j) {
          if (in_basis(j)) continue;
          if (cost[j] - price(y, j) < -opt_.pivot_tol) {
            enter = j;
            break;
          }
        }
      } else {
        double best_reduced = -opt_.pivot_tol;
        for (int j = 0; j < n_; ++j) {
          if (in_basis(j)) continue;
          const double d = cost[j] - price(y, j);
          if (d < best_reduced) {
            best_reduced = d;
            enter = j;
          }
        }
      }
      if (enter == -1) return true;  // optimal for this phase

      std::vector<double> w = ftran(enter);
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        double wi = w[i];
        // basic artificials sit at zero and must not grow: pivot them out
        // on any usable entry regardless of sign
        if (basis_[i] >= n_ && std::abs(wi) > opt_.pivot_tol) wi = std::abs(wi);
        if (wi > opt_.pivot_tol) {
          const double ratio = std::max(xb_[i], 0.0) / wi;
          if (ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 && (leave == -1 || basis_[i] < basis_[leave]))) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave == -1) return false;  // unbounded direction

      pivot(enter, leave, w);

      const double obj = objective(cost);
      if (obj < best_obj - 1e-12 * (1.0 + std::abs(best_obj))) {
        best_obj = obj;
        stall = 0;
      } else if (++stall >= opt_.stall_limit) {
        bland = true;
      }
    }
    return false;
  }

  double objective(const std::vector<double>& cost) const {
    double s = 0.0;
    for (int i = 0; i < m_; ++i) s += cost[basis_[i]] * xb_[i];
    return s;
  }

  std::vector<double> duals(const std::vector<double>& cost) const {
    std::vector<double> y(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      for (int r = 0; r < m_; ++r) y[r] += cb * binv_(i, r);
    }
    return y;
  }

  // Rebuild the inverse from the current basis and refine x_B against b.
  void refactor(const std::vector<double>& /*cost*/) {
    Matrix bmat(m_, m_);
    for (int i = 0; i < m_; ++i)
      for (int r = 0; r < m_; ++r) bmat(r, i) = column_entry(basis_[i], r);
    Matrix inv = invert(bmat);
    binv_ = std::move(inv);
    xb_.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i)
      for (int r = 0; r < m_; ++r) xb_[i] += binv_(i, r) * b_[r];
    // one refinement step against the basis equations
    std::vector<double> resid(m_, 0.0);
    for (int r = 0; r < m_; ++r) {
      double s = 0.0;
      for (int i = 0; i < m_; ++i) s += column_entry(basis_[i], r) * xb_[i];
      resid[r] = b_[r] - s;
    }
    for (int i = 0; i < m_; ++i) {
      double corr = 0.0;
      for (int r = 0; r < m_; ++r) corr += binv_(i, r) * resid[r];
      xb_[i] += corr;
    }
  }

  const std::vector<int>& basis() const { return basis_; }
  const std::vector<double>& basic_values() const { return xb_; }
  int num_structural() const { return n_; }

 private:
  double column_entry(int j, int row) const {
    if (j < n_) return cols_[j][row];
    return j - n_ == row ? 1.0 : 0.0;
  }

  bool in_basis(int j) const {
    for (int i = 0; i < m_; ++i)
      if (basis_[i] == j) return true;
    return false;
  }

  double price(const std::vector<double>& y, int j) const {
    if (j >= n_) return y[j - n_];
    const std::vector<double>& col = cols_[j];
    double s = 0.0;
    for (int r = 0; r < m_; ++r) s += y[r] * col[r];
    return s;
  }

  std::vector<double> ftran(int j) const {
    std::vector<double> w(m_, 0.0);
    if (j >= n_) {
      const int r = j - n_;
      for (int i = 0; i < m_; ++i) w[i] = binv_(i, r);
      return w;
    }
    const std::vector<double>& col = cols_[j];
    for (int r = 0; r < m_; ++r) {
      const double v = col[r];
      if (v == 0.0) continue;
      for (int i = 0; i < m_; ++i) w[i] += binv_(i, r) * v;
    }
    return w;
  }

  void pivot(int enter, int leave, const std::vector<double>& w) {
    const double piv = w[leave];
    for (int r = 0; r < m_; ++r) binv_(leave, r) /= piv;
    xb_[leave] /= piv;
    for (int i = 0; i < m_; ++i) {
      if (i == leave) continue;
      const double f = w[i];
      if (f == 0.0) continue;
      for (int r = 0; r < m_; ++r) binv_(i, r) -= f * binv_(leave, r);
      xb_[i] -= f * xb_[leave];
    }
    basis_[leave] = enter;
  }

  static Matrix invert(Matrix a) {
    const int n = a.rows();
    Matrix inv = Matrix::identity(n);
    for (int col = 0; col < n; ++col) {
      int piv = col;
      for (int r = col + 1; r < n; ++r)
        if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
      if (std::abs(a(piv, col)) < 1e-14) throw SolverFailure("simplex: singular basis", 0.0);
      if (piv != col)
        for (int k = 0; k < n; ++k) {
          std::swap(a(piv, k), a(col, k));
          std::swap(inv(piv, k), inv(col, k));
        }
      const double d = a(col, col);
      for (int k = 0; k < n; ++k) {
        a(col, k) /= d;
        inv(col, k) /= d;
      }
      for (int r = 0; r < n; ++r) {
        if (r == col) continue;
        const double f = a(r, col);
        if (f == 0.0) continue;
        for (int k = 0; k < n; ++k) {
          a(r, k) -= f * a(col, k);
          inv(r, k) -= f * inv(col, k);
        }
      }
    }
    return inv;
  }

  const std::vector<std::vector<double>>& cols_;
  std::vector<double> b_;
  LpOptions opt_;
  int m_, n_;
  std::vector<int> basis_;
  Matrix binv_;
  std::vector<double> xb_;
};

}  // namespace detail

/// Solve min c.x s.t. A x = b, x >= 0 with A given column-major.
inline LpSolution solve_equality_lp(const std::vector<std::vector<double>>& columns,
                                    std::vector<double> b, const std::vector<double>& c,
                                    const LpOptions& opt = {}) {
  const int m = static_cast<int>(b.size());
  const int n = static_cast<int>(columns.size());
  for (const auto& col : columns)
    if (static_cast<int>(col.size()) != m) throw std::invalid_argument("lp: column length mismatch");
  if (static_cast<int>(c.size()) != n) throw std::invalid_argument("lp: cost length mismatch");

  // normalize to b >= 0
  std::vector<std::vector<double>> cols = columns;
  std::vector<char> flipped(m, 0);
  double scale = 1.0;
  for (int r = 0; r < m; ++r) {
    scale = std::max(scale, std::abs(b[r]));
    if (b[r] < 0.0) {
      flipped[r] = 1;
      b[r] = -b[r];
      for (auto& col : cols) col[r] = -col[r];
    }
  }
  for (const auto& col : cols)
    for (double v : col) scale = std::max(scale, std::abs(v));

  detail::SimplexCore core(cols, b, opt);
  LpSolution out;
  try {
    std::vector<double> phase1_cost(n + m, 0.0);
    for (int j = n; j < n + m; ++j) phase1_cost[j] = 1.0;
    int iterations = 0;
    if (!core.run(phase1_cost, iterations)) {
      out.iterations = iterations;
      return out;  // solver_failure
    }
    core.refactor(phase1_cost);
    if (core.objective(phase1_cost) > 1e-7 * scale) {
      out.status = Status::infeasible;
      out.iterations = iterations;
      return out;
    }

    std::vector<double> phase2_cost(n + m, 0.0);
    for (int j = 0; j < n; ++j) phase2_cost[j] = c[j];
    if (!core.run(phase2_cost, iterations)) {
      out.iterations = iterations;
      return out;
    }
    core.refactor(phase2_cost);
    out.iterations = iterations;
  } catch (const SolverFailure&) {
    return out;
  }

  out.status = Status::ok;
  std::vector<double> phase2_cost(n + m, 0.0);
  for (int j = 0; j < n; ++j) phase2_cost[j] = c[j];
  out.objective = core.objective(phase2_cost);
  out.dual = core.duals(phase2_cost);
  for (int r = 0; r < m; ++r)
    if (flipped[r]) out.dual[r] = -out.dual[r];
  out.x.assign(n, 0.0);
  const auto& basis = core.basis();
  const auto& xb = core.basic_values();
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n) out.x[basis[i]] = std::max(xb[i], 0.0);
    // any artificial still basic sits at ~0 on a redundant row
  }
  return out;
}

}  // namespace maxlsh
