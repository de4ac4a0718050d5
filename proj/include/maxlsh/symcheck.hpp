#pragma once

// Symmetric-side feasibility diagnostics: is D = (1-Z)/2 a metric, does a
// point set contain an obtuse triangle (the two are the same question for
// Gram matrices), and the generalized-LSH alpha bounds -- the eigenvalue
// upper bound and the PSD-necessity lower bound.

#include <array>
#include <cmath>
#include <optional>

#include "maxlsh/matrix.hpp"
#include "maxlsh/ratio.hpp"
#include "maxlsh/simcore.hpp"

namespace maxlsh {

/// Checks all n^3 triangle inequalities of D = (1 - Z)/2 with slack 1e-12;
/// returns the first violating (x, y, w) in lexicographic order, meaning
/// D(x,y) > D(x,w) + D(w,y).
inline std::pair<bool, std::optional<std::array<int, 3>>> is_metric(const SimMatrix& zin) {
  if (!zin.is_symmetric) throw std::invalid_argument("is_metric: Z must be symmetric");
  const Matrix& z = zin.values;
  const int n = z.rows();
  for (int i = 0; i < n; ++i)
    if (std::abs(z(i, i) - 1.0) > 1e-12)
      throw std::invalid_argument("is_metric: diagonal must be 1");
  auto d = [&](int a, int b) { return (1.0 - z(a, b)) / 2.0; };
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int w = 0; w < n; ++w)
        if (d(x, y) > d(x, w) + d(w, y) + 1e-12)
          return {false, std::array<int, 3>{x, y, w}};
  return {true, std::nullopt};
}

/// First triple (x, y, z) of unit vectors with <z - x, z - y> < -1e-12 (z is
/// the obtuse apex), or none. Asserts the algebraic equivalence with the
/// triangle rewrite (1 - <z,x>) + (1 - <z,y>) < (1 - <x,y>) on every hit.
inline std::optional<std::array<int, 3>> find_obtuse_triple(const Matrix& points) {
  const int n = points.rows();
  for (int i = 0; i < n; ++i)
    if (std::abs(points.row_squared_norm(i) - 1.0) > 2e-9)
      throw std::invalid_argument("find_obtuse_triple: rows must be unit vectors");
  auto ip = [&](int a, int b) {
    const double* pa = points.row_ptr(a);
    const double* pb = points.row_ptr(b);
    double s = 0.0;
    for (int k = 0; k < points.cols(); ++k) s += pa[k] * pb[k];
    return s;
  };
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        if (z == x || z == y) continue;
        const double corner = 1.0 - ip(z, y) - ip(x, z) + ip(x, y);
        if (corner < -1e-12) {
          const double rewrite = (1.0 - ip(z, x)) + (1.0 - ip(z, y)) - (1.0 - ip(x, y));
          if (std::abs(corner - rewrite) > 1e-9)
            throw std::logic_error("find_obtuse_triple: triangle rewrite mismatch");
          return std::array<int, 3>{x, y, z};
        }
      }
  return std::nullopt;
}

/// Reported upper bound C * (1 - lambda_min) * ln n for the generalized-LSH
/// alpha of a symmetric unit-diagonal similarity. The constant of the cited
/// external hash family is unspecified; C stands in for it and the value is
/// a bound to report, not a construction.
inline double generalized_alpha_upper(const SimMatrix& z, double C = 1.0) {
  const Spectrum sp = spectrum(z);
  return C * (1.0 - sp.lambda_min) * std::log(static_cast<double>(z.rows()));
}

/// PSD-necessity lower bound: minimize theta + gamma subject to
/// Z + theta J + gamma I being positive semidefinite. For fixed theta the
/// least gamma is -lambda_min(Z + theta J), and theta + gamma is convex in
/// theta, so a golden-section over theta suffices. Both the theta+gamma
/// reading and the diagonal-identity reading 1+theta+gamma are reported.
struct GeneralizedAlphaLower {
  double alpha_shift_reading = 0.0;  // theta + gamma
  double alpha_diag_reading = 0.0;   // 1 + theta + gamma
  double theta = 0.0;
  double gamma = 0.0;
};

inline GeneralizedAlphaLower generalized_alpha_lower(const SimMatrix& zin,
                                                     int golden_iterations = 80) {
  if (!zin.is_symmetric) throw std::invalid_argument("generalized_alpha_lower: Z must be symmetric");
  const Matrix& z = zin.values;
  const int n = z.rows();
  auto gamma_at = [&](double theta) {
    Matrix shifted = z;
    for (double& v : shifted.data()) v += theta;
    return -spectrum(shifted).lambda_min;
  };
  auto objective = [&](double theta) { return theta + gamma_at(theta); };

  const double span = z.max_abs() + n;
  double a = -span, b = span;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = objective(x1), f2 = objective(x2);
  for (int it = 0; it < golden_iterations; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = objective(x2);
    }
  }
  GeneralizedAlphaLower out;
  out.theta = f1 <= f2 ? x1 : x2;
  out.gamma = gamma_at(out.theta);
  out.alpha_shift_reading = out.theta + out.gamma;
  out.alpha_diag_reading = 1.0 + out.alpha_shift_reading;
  return out;
}

/// Aggregate feasibility report for the `check` interface.
struct LshFeasibilityReport {
  bool triangle_ok = false;
  std::optional<std::array<int, 3>> obtuse_triple;  // triangle violation as apex triple
  Status cut_cone_status = Status::ok;              // ok = feasible; infeasible; too_large = skipped
  std::optional<double> symmetric_alpha;
  double generalized_alpha_upper = 0.0;
  GeneralizedAlphaLower generalized_alpha_lower;
};

/// Run the full symmetric pipeline: triangle check, cut-cone LP (delegated
/// to the ratio module for n <= 14, skipped above), eigenvalue bounds.
inline LshFeasibilityReport check_lsh_feasibility(const SimMatrix& z, double C = 1.0) {
  LshFeasibilityReport rep;
  auto [ok, triple] = is_metric(z);
  rep.triangle_ok = ok;
  if (!ok) {
    // D(x,y) > D(x,w) + D(w,y) means w is the obtuse apex for (x, y)
    rep.obtuse_triple = std::array<int, 3>{(*triple)[0], (*triple)[1], (*triple)[2]};
  }
  if (z.rows() <= 14) {
    SymmetricLshResult cut = min_symmetric_lsh_alpha(z);
    rep.cut_cone_status = cut.status;
    if (cut.status == Status::ok) rep.symmetric_alpha = cut.alpha;
  } else {
    rep.cut_cone_status = Status::too_large;  // skipped; triangle check only
  }
  rep.generalized_alpha_upper = maxlsh::generalized_alpha_upper(z, C);
  rep.generalized_alpha_lower = maxlsh::generalized_alpha_lower(z);
  return rep;
}

}  // namespace maxlsh
