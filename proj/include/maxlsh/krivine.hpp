#pragma once

// Truncated Krivine embedding. For unit vectors u, v and c = asinh(1) the
// full tensor series gives unit vectors u', v' with <u',v'> = sin(c <u,v>);
// truncating at order 2K+1 and renormalizing by the partial series mass
// keeps the vectors exactly unit at the cost of a quantified bias
// (1 - norm_partial, about 8.3e-5 at K = 2).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "maxlsh/common.hpp"
#include "maxlsh/matrix.hpp"

namespace maxlsh {

inline double krivine_c() { return std::asinh(1.0); }  // ln(1 + sqrt 2)

/// Krivine's constant K_R = pi / (2 asinh(1)) ~= 1.7822.
inline double krivine_constant() { return std::numbers::pi / (2.0 * krivine_c()); }

/// Partial sum sum_{j<=K} x^(2j+1)/(2j+1)! of the sinh series.
inline double truncated_sinh(double x, int K) {
  double term = x, sum = x;
  for (int j = 1; j <= K; ++j) {
    term *= x * x / ((2.0 * j) * (2.0 * j + 1.0));
    sum += term;
  }
  return sum;
}

/// Partial sum sum_{j<=K} (-1)^j x^(2j+1)/(2j+1)! of the sin series.
inline double truncated_sin(double x, int K) {
  double term = x, sum = x;
  for (int j = 1; j <= K; ++j) {
    term *= -x * x / ((2.0 * j) * (2.0 * j + 1.0));
    sum += term;
  }
  return sum;
}

/// Series mass retained at truncation order K; equals truncated_sinh(c, K)
/// and tends to sinh(c) = 1.
inline double krivine_norm_partial(int K) { return truncated_sinh(krivine_c(), K); }

namespace detail {

inline std::uint64_t krivine_dimension(int r, int K, std::uint64_t cap) {
  std::uint64_t dim = 0, top = 1;
  for (int p = 0; p < 2 * K + 1; ++p) {
    if (top > cap / static_cast<std::uint64_t>(r)) throw TooLargeError("krivine: r^(2K+1) exceeds cap");
    top *= static_cast<std::uint64_t>(r);
    if (p % 2 == 0) dim += top;
  }
  return dim;
}

}  // namespace detail

/// Embed unit rows through the truncated tensor series. Row-side vectors
/// carry the alternating (-1)^j block signs, column-side vectors do not, so
/// that <row', col'> = truncated_sin(c <u,v>) / norm_partial while
/// <row', row'> and <col', col'> follow the sinh series. Rows come out
/// exactly unit. The top tensor block is capped at r^(2K+1) <= dim_cap.
inline Matrix krivine_embed(const Matrix& unit_rows, int K, bool row_side,
                            std::uint64_t dim_cap = std::uint64_t{1} << 24) {
  if (K < 0) throw std::invalid_argument("krivine_embed: K must be >= 0");
  const int r = unit_rows.cols();
  const int n = unit_rows.rows();
  if (r < 1) throw std::invalid_argument("krivine_embed: empty base dimension");
  for (int i = 0; i < n; ++i)
    if (std::abs(unit_rows.row_squared_norm(i) - 1.0) > 2e-9)
      throw std::invalid_argument("krivine_embed: rows must be unit norm");

  const std::uint64_t dim = detail::krivine_dimension(r, K, dim_cap);
  const double c = krivine_c();
  const double np = krivine_norm_partial(K);

  Matrix out(n, static_cast<int>(dim));
  std::vector<double> power, next;
  for (int i = 0; i < n; ++i) {
    const double* u = unit_rows.row_ptr(i);
    double* dst = out.row_ptr(i);
    power.assign(u, u + r);  // u^(x)1
    std::uint64_t offset = 0;
    double factorial = 1.0;  // (2j+1)!
    for (int j = 0, p = 1; j <= K; ++j, p += 2) {
      if (j > 0) {
        factorial *= (2.0 * j) * (2.0 * j + 1.0);
        // two more tensor factors: power <- power (x) u (x) u
        for (int step = 0; step < 2; ++step) {
          next.resize(power.size() * r);
          std::size_t w = 0;
          for (double a : power)
            for (int t = 0; t < r; ++t) next[w++] = a * u[t];
          power.swap(next);
        }
      }
      double coef = std::sqrt(std::pow(c, p) / factorial / np);
      if (row_side && (j % 2 == 1)) coef = -coef;
      for (std::size_t t = 0; t < power.size(); ++t) dst[offset + t] = coef * power[t];
      offset += power.size();
    }
  }
  return out;
}

}  // namespace maxlsh
