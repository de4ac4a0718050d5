#pragma once

// Independent LP oracle for tests: enumerate every size-m column basis,
// solve the square system, and keep the best feasible vertex. Exponential,
// so only for tiny instances; kept deliberately separate from the simplex
// implementation it cross-checks.

#include <cmath>
#include <limits>
#include <vector>

#include "maxlsh/matrix.hpp"

namespace maxlsh_test {

struct RefLpResult {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> x;
};

inline bool solve_square(std::vector<std::vector<double>> a, std::vector<double>& rhs) {
  const int n = static_cast<int>(rhs.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-10) return false;
    std::swap(a[piv], a[col]);
    std::swap(rhs[piv], rhs[col]);
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (int k = col; k < n; ++k) a[r][k] -= f * a[col][k];
      rhs[r] -= f * rhs[col];
    }
  }
  for (int i = 0; i < n; ++i) rhs[i] /= a[i][i];
  return true;
}

/// min c.x s.t. A x = b, x >= 0 by brute-force vertex enumeration.
inline RefLpResult reference_lp(const std::vector<std::vector<double>>& columns,
                                const std::vector<double>& b, const std::vector<double>& c) {
  const int m = static_cast<int>(b.size());
  const int n = static_cast<int>(columns.size());
  RefLpResult best;

  std::vector<int> pick(m);
  for (int i = 0; i < m; ++i) pick[i] = i;
  if (n < m) return best;
  for (;;) {
    // square system from the picked columns
    std::vector<std::vector<double>> a(m, std::vector<double>(m));
    for (int r = 0; r < m; ++r)
      for (int i = 0; i < m; ++i) a[r][i] = columns[pick[i]][r];
    std::vector<double> sol = b;
    if (solve_square(std::move(a), sol)) {
      bool nonneg = true;
      for (double v : sol) nonneg &= v >= -1e-9;
      if (nonneg) {
        double obj = 0.0;
        for (int i = 0; i < m; ++i) obj += c[pick[i]] * sol[i];
        if (!best.feasible || obj < best.objective) {
          best.feasible = true;
          best.objective = obj;
          best.x.assign(n, 0.0);
          for (int i = 0; i < m; ++i) best.x[pick[i]] = std::max(sol[i], 0.0);
        }
      }
    }
    // next combination
    int i = m - 1;
    while (i >= 0 && pick[i] == n - m + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < m; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

}  // namespace maxlsh_test
