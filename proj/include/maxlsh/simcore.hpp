#pragma once

// Core similarity/clustering types: similarity matrices, labelings over a
// finite alphabet, cluster incidence matrices, a symmetric eigensolver, and
// elementwise approximation-error metrics.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "maxlsh/matrix.hpp"

namespace maxlsh {

/// A real similarity (or target) matrix. Entries are not restricted to
/// [-1,1]; constructions that need the unit range validate it themselves.
struct SimMatrix {
  Matrix values;
  bool is_symmetric = false;
  std::optional<std::vector<std::string>> row_labels;
  std::optional<std::vector<std::string>> col_labels;

  SimMatrix() = default;
  explicit SimMatrix(Matrix m) : values(std::move(m)) {
    if (values.rows() < 1 || values.cols() < 1) throw std::invalid_argument("SimMatrix: empty matrix");
    if (!values.all_finite()) throw std::invalid_argument("SimMatrix: non-finite entry");
    is_symmetric = values.is_symmetric();  // exact transpose equality
  }

  int rows() const { return values.rows(); }
  int cols() const { return values.cols(); }
  double operator()(int i, int j) const { return values(i, j); }
};

/// Cluster assignment over the alphabet {0..k-1}. Binary clusterings use
/// k = 2; the +-1 convention for binary alphabets lives at the incidence
/// level, not here.
struct Labeling {
  std::vector<int> labels;
  int k = 2;

  Labeling() = default;
  Labeling(std::vector<int> l, int alphabet) : labels(std::move(l)), k(alphabet) {
    if (k < 1) throw std::invalid_argument("Labeling: alphabet size must be positive");
    for (int v : labels)
      if (v < 0 || v >= k) throw std::invalid_argument("Labeling: label outside alphabet");
  }

  int size() const { return static_cast<int>(labels.size()); }
  int operator[](int i) const { return labels[i]; }
};

/// A pair of labelings together with its derived +-1 incidence matrix:
/// kappa(x,y) = +1 iff f(x) = g(y).
struct IncidencePair {
  Labeling f, g;
  Matrix kappa;
};

inline IncidencePair incidence_from_labels(const Labeling& f, const Labeling& g) {
  Matrix kappa(f.size(), g.size());
  for (int x = 0; x < f.size(); ++x)
    for (int y = 0; y < g.size(); ++y) kappa(x, y) = f[x] == g[y] ? 1.0 : -1.0;
  return IncidencePair{f, g, std::move(kappa)};
}

/// 2I + B where B is -1 on the two diagonal half-blocks and +1 off them.
/// Unit diagonal, +-1 off-diagonal, smallest eigenvalue 2-n.
inline SimMatrix theorem2_matrix(int n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("theorem2_matrix: n must be even and >= 2");
  Matrix z(n, n);
  const int half = n / 2;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      const bool same_half = (x < half) == (y < half);
      z(x, y) = (same_half ? -1.0 : 1.0) + (x == y ? 2.0 : 0.0);
    }
  return SimMatrix(std::move(z));
}

/// Eigenvalues of a symmetric matrix, ascending.
struct Spectrum {
  std::vector<double> eigenvalues;
  double lambda_min = 0.0;
};

namespace detail {

// Cyclic Jacobi sweeps; terminates when the off-diagonal Frobenius mass
// drops below 1e-12 * ||Z||_F. When `vectors` is non-null it receives the
// accumulated rotations: a = vectors * diag(values) * vectors^T, with
// column i of `vectors` the eigenvector of the i-th (unsorted) value.
inline std::vector<double> jacobi_eigen(Matrix a, Matrix* vectors) {
  const int n = a.rows();
  const double stop = 1e-12 * a.frobenius_norm();
  if (vectors) *vectors = Matrix::identity(n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
    if (std::sqrt(off) <= stop) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
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
        if (vectors)
          for (int i = 0; i < n; ++i) {
            const double vip = (*vectors)(i, p), viq = (*vectors)(i, q);
            (*vectors)(i, p) = c * vip - s * viq;
            (*vectors)(i, q) = s * vip + c * viq;
          }
      }
    }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = a(i, i);
  if (!vectors) std::sort(ev.begin(), ev.end());
  return ev;
}

inline std::vector<double> jacobi_eigenvalues(Matrix a) { return jacobi_eigen(std::move(a), nullptr); }

}  // namespace detail

inline Spectrum spectrum(const Matrix& z) {
  if (!z.is_symmetric()) throw std::invalid_argument("spectrum: matrix is not symmetric");
  Spectrum s;
  s.eigenvalues = detail::jacobi_eigenvalues(z);
  s.lambda_min = s.eigenvalues.front();
  return s;
}

inline Spectrum spectrum(const SimMatrix& z) {
  if (!z.is_symmetric) throw std::invalid_argument("spectrum: matrix is not symmetric");
  return spectrum(z.values);
}

enum class ErrorMetric { mean_abs, mse, max_abs };

/// Uniform-average (or max) elementwise error between a target and an
/// approximation.
inline double approximation_error(const Matrix& z, const Matrix& zhat, ErrorMetric metric) {
  if (!z.same_shape(zhat)) throw std::invalid_argument("approximation_error: shape mismatch");
  double acc = 0.0;
  for (int i = 0; i < z.rows(); ++i)
    for (int j = 0; j < z.cols(); ++j) {
      const double d = z(i, j) - zhat(i, j);
      switch (metric) {
        case ErrorMetric::mean_abs: acc += std::abs(d); break;
        case ErrorMetric::mse: acc += d * d; break;
        case ErrorMetric::max_abs: acc = std::max(acc, std::abs(d)); break;
      }
    }
  if (metric == ErrorMetric::max_abs) return acc;
  return acc / (static_cast<double>(z.rows()) * z.cols());
}

inline double approximation_error(const SimMatrix& z, const SimMatrix& zhat, ErrorMetric metric) {
  return approximation_error(z.values, zhat.values, metric);
}

}  // namespace maxlsh
