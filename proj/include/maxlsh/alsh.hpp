#pragma once

// Asymmetric LSH construction. From a max-norm witness Z - theta = U V^T
// with max row norm t, Krivine-embed the normalized factor rows, round with
// a shared Gaussian hyperplane, and flip each sign with bias
// 1/2 + |row|/(2 sqrt t). The result is a seeded distribution over binary
// labeling pairs with alpha E[kappa] - theta = Z up to a quantified
// truncation bias, alpha = K_R t / norm_partial.
//
// Two interchangeable Gaussian backends realise the same joint law:
//   gram  - draw the (n+m) rounding Gaussians directly from their closed-form
//           covariance (truncated sin/sinh series of the base inner
//           products), Cholesky-factored once at build time;
//   dense - materialize the tensor embedding and draw one dense Gaussian per
//           tensor block, cost O(sum r^(2j+1)) per sample.
// `gram` is the default; `dense` stays as the direct realization the tests
// cross-check against.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "maxlsh/common.hpp"
#include "maxlsh/krivine.hpp"
#include "maxlsh/matrix.hpp"
#include "maxlsh/maxnorm.hpp"
#include "maxlsh/ratio.hpp"
#include "maxlsh/rng.hpp"
#include "maxlsh/simcore.hpp"

namespace maxlsh {

enum class GaussianBackend { gram, dense };

struct AlshSampler {
  double alpha = 0.0;
  double theta = 0.0;
  Factorization base;  // witness for Z - theta
  std::vector<int> tensor_orders;
  double norm_partial = 1.0;
  std::uint64_t seed = 0;
  GaussianBackend backend = GaussianBackend::gram;
  bool exact_zero = false;  // Z - theta == 0: degenerate, verification skipped

  int n = 0, m = 0;
  std::vector<double> row_norms, col_norms;  // factor row norms, all <= sqrt(t)
  double sqrt_t = 0.0;
  Matrix chol;                          // gram backend: lower Cholesky of the embedded Gram
  Matrix embedded_rows, embedded_cols;  // dense backend: materialized Krivine vectors
};

namespace detail {

// Orthonormal basis coordinates for the row span of [U; V]: returns U and V
// re-expressed in at most rank(span) <= n+m dimensions, preserving all inner
// products. Keeps tensor dimensions small before Krivine embedding.
inline std::pair<Matrix, Matrix> reduce_rank(const Matrix& u, const Matrix& v) {
  const int n = u.rows(), m = v.rows(), r = u.cols();
  std::vector<std::vector<double>> basis;  // orthonormal rows, length r
  double scale = 0.0;
  for (int i = 0; i < n + m; ++i)
    scale = std::max(scale, i < n ? u.row_squared_norm(i) : v.row_squared_norm(i - n));
  const double drop = 1e-13 * std::max(1.0, scale);
  for (int i = 0; i < n + m; ++i) {
    const double* src = i < n ? u.row_ptr(i) : v.row_ptr(i - n);
    std::vector<double> w(src, src + r);
    for (const auto& q : basis) {
      double proj = 0.0;
      for (int k = 0; k < r; ++k) proj += w[k] * q[k];
      for (int k = 0; k < r; ++k) w[k] -= proj * q[k];
    }
    // re-orthogonalize once; plain MGS leaks for near-dependent rows
    for (const auto& q : basis) {
      double proj = 0.0;
      for (int k = 0; k < r; ++k) proj += w[k] * q[k];
      for (int k = 0; k < r; ++k) w[k] -= proj * q[k];
    }
    double norm2 = 0.0;
    for (double x : w) norm2 += x * x;
    if (norm2 > drop) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (double& x : w) x *= inv;
      basis.push_back(std::move(w));
    }
  }
  const int rr = std::max<std::size_t>(basis.size(), 1);
  Matrix ur(n, rr), vr(m, rr);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < static_cast<int>(basis.size()); ++k) {
      double s = 0.0;
      for (int t = 0; t < r; ++t) s += u(i, t) * basis[k][t];
      ur(i, k) = s;
    }
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < static_cast<int>(basis.size()); ++k) {
      double s = 0.0;
      for (int t = 0; t < r; ++t) s += v(j, t) * basis[k][t];
      vr(j, k) = s;
    }
  return {std::move(ur), std::move(vr)};
}

inline Matrix cholesky_psd(Matrix g) {
  const int n = g.rows();
  // tiny jitter absorbs the rounding of an exactly-PSD Gram
  for (int attempt = 0; attempt < 6; ++attempt) {
    Matrix l(n, n);
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      for (int j = 0; j <= i; ++j) {
        double s = g(i, j);
        for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
        if (i == j) {
          if (s <= 0.0) {
            ok = false;
            break;
          }
          l(i, i) = std::sqrt(s);
        } else {
          l(i, j) = s / l(j, j);
        }
      }
    if (ok) return l;
    for (int i = 0; i < n; ++i) g(i, i) += 1e-12 * (1 << attempt);
  }
  throw SolverFailure("alsh: embedded Gram not positive semidefinite", 0.0);
}

}  // namespace detail

/// Build an alpha-ALSH sampler for Z (shift theta = 0, or the centralized
/// optimum). alpha = K_R * t / norm_partial with t from the max-norm witness.
inline AlshSampler build_alsh(const SimMatrix& zin, bool centralized, int K, std::uint64_t seed,
                              const SolverConfig& cfg = {},
                              GaussianBackend backend = GaussianBackend::gram) {
  AlshSampler s;
  s.seed = seed;
  s.backend = backend;
  s.n = zin.rows();
  s.m = zin.cols();
  s.norm_partial = krivine_norm_partial(K);
  for (int j = 0; j <= K; ++j) s.tensor_orders.push_back(2 * j + 1);

  if (centralized) {
    // the sampler realizes alpha E[kappa] = Z - shift, so the ALSH identity
    // alpha E[kappa] - theta = Z holds with theta = -shift
    CenteredMaxNorm cm = centered_max_norm(zin, cfg);
    s.theta = -cm.theta;
    s.base = std::move(cm.inner);
  } else {
    s.base = max_norm(zin, cfg);
  }

  // degenerate target: Z - shift vanishes (up to the golden search's
  // placement noise); alpha = 0 and verification is skipped
  if (s.base.t <= 1e-12 * std::max(1.0, zin.values.max_abs())) {
    s.exact_zero = true;
    s.base.t = 0.0;
    return s;
  }
  s.alpha = krivine_constant() * s.base.t / s.norm_partial;
  s.sqrt_t = std::sqrt(s.base.t);

  auto [ur, vr] = detail::reduce_rank(s.base.U, s.base.V);
  const int rr = ur.cols();
  s.row_norms.resize(s.n);
  s.col_norms.resize(s.m);
  Matrix unit_rows(s.n, rr), unit_cols(s.m, rr);
  for (int i = 0; i < s.n; ++i) {
    const double norm = std::sqrt(ur.row_squared_norm(i));
    if (norm * norm > s.base.t + 1e-9)
      throw SolverFailure("alsh: factor row norm exceeds sqrt(t)", norm * norm - s.base.t);
    s.row_norms[i] = norm;
    for (int k = 0; k < rr; ++k) unit_rows(i, k) = norm > 0.0 ? ur(i, k) / norm : (k == 0 ? 1.0 : 0.0);
  }
  for (int j = 0; j < s.m; ++j) {
    const double norm = std::sqrt(vr.row_squared_norm(j));
    if (norm * norm > s.base.t + 1e-9)
      throw SolverFailure("alsh: factor row norm exceeds sqrt(t)", norm * norm - s.base.t);
    s.col_norms[j] = norm;
    for (int k = 0; k < rr; ++k) unit_cols(j, k) = norm > 0.0 ? vr(j, k) / norm : (k == 0 ? 1.0 : 0.0);
  }

  if (backend == GaussianBackend::dense) {
    s.embedded_rows = krivine_embed(unit_rows, K, /*row_side=*/true);
    s.embedded_cols = krivine_embed(unit_cols, K, /*row_side=*/false);
  } else {
    // closed-form Gram of the embedded vectors: sinh series within a side,
    // sin series across sides, everything over norm_partial
    const double c = krivine_c();
    const int total = s.n + s.m;
    auto base_dot = [&](int a, int b) {
      const double* pa = a < s.n ? unit_rows.row_ptr(a) : unit_cols.row_ptr(a - s.n);
      const double* pb = b < s.n ? unit_rows.row_ptr(b) : unit_cols.row_ptr(b - s.n);
      double dotv = 0.0;
      for (int k = 0; k < rr; ++k) dotv += pa[k] * pb[k];
      return std::min(1.0, std::max(-1.0, dotv));
    };
    Matrix gram(total, total);
    for (int a = 0; a < total; ++a) {
      gram(a, a) = 1.0;
      for (int b = a + 1; b < total; ++b) {
        const bool same_side = (a < s.n) == (b < s.n);
        const double sdot = base_dot(a, b);
        const double g = (same_side ? truncated_sinh(c * sdot, K) : truncated_sin(c * sdot, K)) /
                         s.norm_partial;
        gram(a, b) = gram(b, a) = g;
      }
    }
    s.chol = detail::cholesky_psd(std::move(gram));
  }
  return s;
}

/// One draw from the sampler: a binary labeling pair whose incidence matrix
/// is the Lemma-style rounding of the Krivine embedding. Pure in
/// (sampler.seed, draw_index): disjoint index ranges can be sampled by
/// independent workers and merged in any order.
inline IncidencePair sample_pair(const AlshSampler& s, std::uint64_t draw_index) {
  if (s.exact_zero) {
    // degenerate sampler: the constant clustering
    return incidence_from_labels(Labeling(std::vector<int>(s.n, 0), 2),
                                 Labeling(std::vector<int>(s.m, 0), 2));
  }
  Rng rng(s.seed, draw_index);
  const int total = s.n + s.m;
  std::vector<int> raw(total);

  if (s.backend == GaussianBackend::gram) {
    std::vector<double> xi(total);
    for (double& x : xi) x = rng.gaussian();
    for (int a = 0; a < total; ++a) {
      double g = 0.0;
      for (int b = 0; b <= a; ++b) g += s.chol(a, b) * xi[b];
      raw[a] = g >= 0.0 ? 1 : -1;
    }
  } else {
    const int dim = s.embedded_rows.cols();
    std::vector<double> z(dim);
    for (double& x : z) x = rng.gaussian();
    for (int i = 0; i < s.n; ++i) {
      const double* w = s.embedded_rows.row_ptr(i);
      double g = 0.0;
      for (int k = 0; k < dim; ++k) g += w[k] * z[k];
      raw[i] = g >= 0.0 ? 1 : -1;
    }
    for (int j = 0; j < s.m; ++j) {
      const double* w = s.embedded_cols.row_ptr(j);
      double g = 0.0;
      for (int k = 0; k < dim; ++k) g += w[k] * z[k];
      raw[s.n + j] = g >= 0.0 ? 1 : -1;
    }
  }

  // independent biased sign flips; +1 with probability 1/2 + |row|/(2 sqrt t)
  std::vector<int> f(s.n), g(s.m);
  for (int i = 0; i < s.n; ++i) {
    const double p = std::min(1.0, 0.5 + s.row_norms[i] / (2.0 * s.sqrt_t));
    const int flip = rng.uniform() < p ? 1 : -1;
    f[i] = flip * raw[i] > 0 ? 0 : 1;
  }
  for (int j = 0; j < s.m; ++j) {
    const double p = std::min(1.0, 0.5 + s.col_norms[j] / (2.0 * s.sqrt_t));
    const int flip = rng.uniform() < p ? 1 : -1;
    g[j] = flip * raw[s.n + j] > 0 ? 0 : 1;
  }
  return incidence_from_labels(Labeling(std::move(f), 2), Labeling(std::move(g), 2));
}

/// A seeded distribution over labeling pairs obeying the ALSH contract
/// alpha E[kappa] - theta = Z. Wraps both the Krivine sampler and finite-
/// support certificate samplers so reductions apply to either.
struct KArySampler {
  double alpha = 0.0;
  double theta = 0.0;
  int k = 2;
  std::function<std::pair<Labeling, Labeling>(std::uint64_t)> draw;
};

inline KArySampler as_kary(const AlshSampler& s) {
  KArySampler out;
  out.alpha = s.alpha;
  out.theta = s.theta;
  out.k = 2;
  out.draw = [s](std::uint64_t idx) {
    IncidencePair p = sample_pair(s, idx);
    return std::make_pair(p.f, p.g);
  };
  return out;
}

/// Turn an LP certificate into a sampler: draw support pair p with
/// probability mu_p / sum mu. Requires a strictly positive value.
inline KArySampler certificate_sampler(const RatioCertificate& cert, std::uint64_t seed) {
  if (cert.value <= 0.0 || cert.weights.empty())
    throw std::invalid_argument("certificate_sampler: certificate has empty support");
  KArySampler out;
  out.alpha = cert.value;
  out.theta = cert.theta;
  out.k = cert.k;
  std::vector<double> cdf;
  cdf.reserve(cert.weights.size());
  double acc = 0.0;
  for (const auto& [pair, mu] : cert.weights) cdf.push_back(acc += mu);
  auto weights = std::make_shared<std::vector<std::pair<Labeling, Labeling>>>();
  for (const auto& [pair, mu] : cert.weights) weights->emplace_back(pair.f, pair.g);
  out.draw = [cdf, weights, seed, total = acc](std::uint64_t idx) {
    Rng rng(seed, idx);
    const double u = rng.uniform() * total;
    std::size_t lo = 0, hi = cdf.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cdf[mid] > u)
        hi = mid;
      else
        lo = mid + 1;
    }
    return (*weights)[lo];
  };
  return out;
}

/// Compose a k-ary sampler with a fresh uniform sign assignment h: [k]->{+-1}
/// per draw: alpha' = 2 alpha, theta' = theta + alpha, binary output alphabet.
inline KArySampler binary_reduce(const KArySampler& base, std::uint64_t seed) {
  KArySampler out;
  out.alpha = 2.0 * base.alpha;
  out.theta = base.theta + base.alpha;
  out.k = 2;
  out.draw = [base, seed](std::uint64_t idx) {
    auto [f, g] = base.draw(idx);
    Rng rng(seed, idx);
    std::vector<int> h(base.k);
    for (int& v : h) v = rng.sign();
    std::vector<int> fb(f.size()), gb(g.size());
    for (int x = 0; x < f.size(); ++x) fb[x] = h[f[x]] > 0 ? 0 : 1;
    for (int y = 0; y < g.size(); ++y) gb[y] = h[g[y]] > 0 ? 0 : 1;
    return std::make_pair(Labeling(std::move(fb), 2), Labeling(std::move(gb), 2));
  };
  return out;
}

/// Length-d Hamming codes: column i of F/G is the i-th drawn labeling pair.
struct HammingEmbedding {
  std::vector<std::vector<int>> F, G;  // n x d and m x d label matrices
  double alpha = 0.0;
  double theta = 0.0;
  int d = 0;
};

inline HammingEmbedding embed(const AlshSampler& s, int d, std::uint64_t first_draw = 0) {
  if (d < 1) throw std::invalid_argument("embed: d must be >= 1");
  HammingEmbedding e;
  e.alpha = s.alpha;
  e.theta = s.theta;
  e.d = d;
  e.F.assign(s.n, std::vector<int>(d));
  e.G.assign(s.m, std::vector<int>(d));
  for (int i = 0; i < d; ++i) {
    IncidencePair p = sample_pair(s, first_draw + static_cast<std::uint64_t>(i));
    for (int x = 0; x < s.n; ++x) e.F[x][i] = p.f[x];
    for (int y = 0; y < s.m; ++y) e.G[y][i] = p.g[y];
  }
  return e;
}

/// (alpha/d) sum_i kappa(F[x][i], G[y][i]) - theta.
inline double reconstruct(const HammingEmbedding& e, int x, int y) {
  int agree = 0;
  for (int i = 0; i < e.d; ++i) agree += e.F[x][i] == e.G[y][i] ? 1 : -1;
  return e.alpha * agree / e.d - e.theta;
}

/// Monte-Carlo check of the ALSH contract over draws [first_draw,
/// first_draw + samples).
struct UnbiasednessReport {
  int samples = 0;
  double max_abs_deviation = 0.0;  // max entrywise |alpha Ehat[kappa] - theta - Z|
  double hoeffding_band = 0.0;     // alpha sqrt(2 ln(2nm/delta) / N)
  double bias_allowance = 0.0;     // truncation bias + fit residual
  bool within_band = false;
  bool skipped = false;  // exact-zero sampler
};

template <class DrawKappa>
inline UnbiasednessReport verify_expectation(DrawKappa&& draw, double alpha, double theta,
                                             const Matrix& z, int samples, double delta,
                                             double bias_allowance,
                                             std::uint64_t first_draw = 0) {
  const int n = z.rows(), m = z.cols();
  Matrix sum(n, m);
  for (int i = 0; i < samples; ++i) {
    const Matrix kappa = draw(first_draw + static_cast<std::uint64_t>(i));
    sum += kappa;
  }
  UnbiasednessReport rep;
  rep.samples = samples;
  rep.bias_allowance = bias_allowance;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < m; ++y) {
      const double approx = alpha * sum(x, y) / samples - theta;
      rep.max_abs_deviation = std::max(rep.max_abs_deviation, std::abs(approx - z(x, y)));
    }
  rep.hoeffding_band =
      std::abs(alpha) * std::sqrt(2.0 * std::log(2.0 * n * m / delta) / samples);
  rep.within_band = rep.max_abs_deviation <= rep.hoeffding_band + bias_allowance;
  return rep;
}

inline UnbiasednessReport verify_unbiasedness(const AlshSampler& s, const SimMatrix& z,
                                              int samples, double delta = 0.01,
                                              std::uint64_t first_draw = 0) {
  if (s.exact_zero) {
    UnbiasednessReport rep;
    rep.skipped = true;
    rep.within_band = true;
    return rep;
  }
  const double truncation = s.alpha * (1.0 - s.norm_partial) / s.norm_partial;
  return verify_expectation([&](std::uint64_t idx) { return sample_pair(s, idx).kappa; }, s.alpha,
                            s.theta, z.values, samples, delta, truncation + s.base.residual,
                            first_draw);
}

inline UnbiasednessReport verify_unbiasedness(const KArySampler& s, const SimMatrix& z,
                                              int samples, double delta = 0.01,
                                              std::uint64_t first_draw = 0) {
  return verify_expectation(
      [&](std::uint64_t idx) {
        auto [f, g] = s.draw(idx);
        return incidence_from_labels(f, g).kappa;
      },
      s.alpha, s.theta, z.values, samples, delta, 0.0, first_draw);
}

/// Empirical mean squared reconstruction error of length-d embeddings,
/// averaged over entries and repetitions, against the alpha^2/d law.
struct EmbeddingErrorReport {
  int d = 0;
  int repetitions = 0;
  double mse = 0.0;
  double mse_bound = 0.0;  // alpha^2 / d
};

inline EmbeddingErrorReport verify_embedding_error(const AlshSampler& s, const SimMatrix& z,
                                                   int d, int repetitions,
                                                   std::uint64_t first_draw = 0) {
  EmbeddingErrorReport rep;
  rep.d = d;
  rep.repetitions = repetitions;
  rep.mse_bound = s.alpha * s.alpha / d;
  double acc = 0.0;
  std::uint64_t cursor = first_draw;
  for (int rep_i = 0; rep_i < repetitions; ++rep_i, cursor += d) {
    HammingEmbedding e = embed(s, d, cursor);
    for (int x = 0; x < s.n; ++x)
      for (int y = 0; y < s.m; ++y) {
        const double diff = z(x, y) - reconstruct(e, x, y);
        acc += diff * diff;
      }
  }
  rep.mse = acc / (static_cast<double>(repetitions) * s.n * s.m);
  return rep;
}

/// Exhaustive minimum of the entrywise error between Z and R R^T / d over
/// all sign matrices R in {+-1}^(n x d); ties resolve to the
/// lexicographically smallest R (row-major, -1 before +1).
struct BruteForceEmbedding {
  Matrix R;
  double error = 0.0;
};

inline BruteForceEmbedding best_binary_embedding_bruteforce(const SimMatrix& zin, int d,
                                                            ErrorMetric metric) {
  const Matrix& z = zin.values;
  if (!zin.is_symmetric) throw std::invalid_argument("best_binary_embedding_bruteforce: Z must be symmetric");
  const int n = z.rows();
  const int bits = n * d;
  if (bits > 24) throw TooLargeError("best_binary_embedding_bruteforce: 2^(n d) exceeds 2^24");

  BruteForceEmbedding best;
  best.error = std::numeric_limits<double>::infinity();
  Matrix r(n, d);
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << bits); ++code) {
    for (int b = 0; b < bits; ++b) {
      // entry (b / d, b % d) takes the bit with row-major significance
      const int bit = static_cast<int>((code >> (bits - 1 - b)) & 1);
      r(b / d, b % d) = bit ? 1.0 : -1.0;
    }
    Matrix x = r.matmul_transposed(r);
    x *= 1.0 / d;
    const double err = approximation_error(z, x, metric);
    if (err < best.error) {
      best.error = err;
      best.R = r;
    }
  }
  return best;
}

}  // namespace maxlsh
