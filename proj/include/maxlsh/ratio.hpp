#pragma once

// Exact cluster ratio rho_k and centralized cluster ratio rho-hat_k on small
// instances: enumerate the distinct incidence matrices over alphabet [k],
// then solve the covering LP
//
//   minimize sum mu   s.t.  sum mu * kappa - theta * J = Z,  mu >= 0
//
// (theta is a free variable, split into a difference of two nonnegative
// columns, only in the centralized variant). Also the cut-cone LP deciding
// whether a symmetric similarity admits any alpha-LSH at all.

#include <array>
#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include "maxlsh/common.hpp"
#include "maxlsh/matrix.hpp"
#include "maxlsh/simcore.hpp"
#include "maxlsh/simplex.hpp"

namespace maxlsh {

struct EnumerationOptions {
  std::uint64_t cap = std::uint64_t{1} << 20;  // limit on k^n * k^m labeling pairs
  // Labels beyond min(n,m)+2 cannot produce new incidence patterns (matched
  // blocks <= min(n,m), plus one spare label per side); clamping the alphabet
  // before enumerating keeps the work polynomial in the pattern count. The
  // cap is still checked against the nominal k. Disable to force the literal
  // product enumeration.
  bool clamp_alphabet = true;
};

namespace detail {

struct BitKey {
  std::vector<std::uint64_t> words;
  bool operator==(const BitKey& o) const { return words == o.words; }
};

struct BitKeyHash {
  std::size_t operator()(const BitKey& k) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint64_t w : k.words) {
      h ^= w;
      h *= 0x100000001b3ULL;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};

inline BitKey kappa_key(const std::vector<int>& f, const std::vector<int>& g) {
  BitKey key;
  key.words.assign((f.size() * g.size() + 63) / 64, 0);
  std::size_t bit = 0;
  for (int fx : f)
    for (int gy : g) {
      if (fx == gy) key.words[bit >> 6] |= std::uint64_t{1} << (bit & 63);
      ++bit;
    }
  return key;
}

// k^n * k^m with saturation, to test the cap without overflow.
inline std::uint64_t pair_count(int n, int m, int k) {
  std::uint64_t count = 1;
  for (int i = 0; i < n + m; ++i) {
    if (count > (std::uint64_t{1} << 62) / static_cast<std::uint64_t>(k))
      return std::uint64_t{1} << 63;
    count *= static_cast<std::uint64_t>(k);
  }
  return count;
}

}  // namespace detail

/// All distinct incidence matrices kappa_{f,g} over f:[n]->[k], g:[m]->[k],
/// deduplicated by exact entrywise equality.
inline std::vector<IncidencePair> enumerate_incidence(int n, int m, int k,
                                                      const EnumerationOptions& opt = {}) {
  if (n < 1 || m < 1) throw std::invalid_argument("enumerate_incidence: empty side");
  if (k < 2) throw std::invalid_argument("enumerate_incidence: alphabet must have k >= 2");
  if (detail::pair_count(n, m, k) > opt.cap)
    throw TooLargeError("enumerate_incidence: k^n * k^m exceeds cap");

  const int k_eff = opt.clamp_alphabet ? std::min(k, std::min(n, m) + 2) : k;

  std::vector<IncidencePair> out;
  std::unordered_set<detail::BitKey, detail::BitKeyHash> seen;
  std::vector<int> f(n, 0), g(m, 0);
  for (;;) {
    for (;;) {
      auto key = detail::kappa_key(f, g);
      if (seen.insert(std::move(key)).second)
        out.push_back(incidence_from_labels(Labeling(f, k), Labeling(g, k)));
      // odometer over g
      int pos = m - 1;
      while (pos >= 0 && ++g[pos] == k_eff) g[pos--] = 0;
      if (pos < 0) break;
    }
    int pos = n - 1;
    while (pos >= 0 && ++f[pos] == k_eff) f[pos--] = 0;
    if (pos < 0) break;
  }
  return out;
}

/// LP optimum with its full support: Z = sum mu kappa - theta J, value = sum mu.
struct RatioCertificate {
  double value = 0.0;
  std::vector<std::pair<IncidencePair, double>> weights;  // mu > 0 entries only
  double theta = 0.0;
  int k = 2;
  bool centralized = false;
  double dual_value = 0.0;  // weak-duality companion, for inspection
  Status status = Status::ok;
};

inline RatioCertificate cluster_ratio(const SimMatrix& zin, int k, bool centralized,
                                      const EnumerationOptions& opt = {}) {
  const Matrix& z = zin.values;
  const int n = z.rows(), m = z.cols();

  RatioCertificate cert;
  cert.k = k;
  cert.centralized = centralized;

  if (!centralized && z.max_abs() == 0.0) {
    // rho(0) = 0 by convention: the empty combination
    return cert;
  }

  std::vector<IncidencePair> patterns = enumerate_incidence(n, m, k, opt);
  const int nm = n * m;

  std::vector<std::vector<double>> columns;
  columns.reserve(patterns.size() + 2);
  for (const auto& p : patterns) {
    std::vector<double> col(nm);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) col[i * m + j] = p.kappa(i, j);
    columns.push_back(std::move(col));
  }
  std::vector<double> cost(patterns.size(), 1.0);
  if (centralized) {
    // theta = theta_plus - theta_minus, both free of objective charge
    columns.emplace_back(nm, -1.0);
    columns.emplace_back(nm, 1.0);
    cost.push_back(0.0);
    cost.push_back(0.0);
  }

  std::vector<double> rhs(nm);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) rhs[i * m + j] = z(i, j);

  LpSolution lp = solve_equality_lp(columns, rhs, cost);
  if (lp.status == Status::infeasible) {
    // cannot happen for k >= 2: binary incidence matrices span everything
    cert.status = Status::infeasible;
    return cert;
  }
  if (lp.status != Status::ok) {
    cert.status = Status::solver_failure;
    return cert;
  }

  cert.value = lp.objective;
  for (std::size_t j = 0; j < patterns.size(); ++j)
    if (lp.x[j] > 0.0) cert.weights.emplace_back(patterns[j], lp.x[j]);
  if (centralized) cert.theta = lp.x[patterns.size()] - lp.x[patterns.size() + 1];
  for (int r = 0; r < nm; ++r) cert.dual_value += lp.dual[r] * rhs[r];
  return cert;
}

/// Replay a certificate: max entrywise |sum mu kappa - theta J - Z|.
inline double certificate_residual(const RatioCertificate& cert, const SimMatrix& z) {
  Matrix acc(z.rows(), z.cols(), -cert.theta);
  for (const auto& [pair, mu] : cert.weights)
    for (int i = 0; i < z.rows(); ++i)
      for (int j = 0; j < z.cols(); ++j) acc(i, j) += mu * pair.kappa(i, j);
  return approximation_error(z.values, acc, ErrorMetric::max_abs);
}

/// One cut pseudometric: S is a bitmask over [n] with element 0 excluded.
struct CutWeight {
  std::uint32_t subset = 0;
  double lambda = 0.0;
};

/// Outcome of the cut-cone LP for a symmetric unit-diagonal similarity.
/// status == infeasible means no alpha-LSH exists for Z, for any alpha --
/// a legitimate result, not an error.
struct SymmetricLshResult {
  Status status = Status::ok;
  double alpha = 0.0;
  double theta = 0.0;  // forced to alpha - 1 by sim(x,x) = 1
  std::vector<CutWeight> cuts;
  std::optional<std::array<int, 3>> violating_triple;  // triangle-inequality certificate
};

/// Least alpha such that a symmetric alpha-LSH exists, via exact cut-cone
/// membership of D = (1 - Z)/2: minimize sum lambda_S subject to
/// sum lambda_S delta_S = D, lambda >= 0, over canonical cuts (0 not in S).
inline SymmetricLshResult min_symmetric_lsh_alpha(const SimMatrix& zin) {
  const Matrix& z = zin.values;
  const int n = z.rows();
  if (!zin.is_symmetric) throw std::invalid_argument("min_symmetric_lsh_alpha: Z must be symmetric");
  if (n > 14) throw TooLargeError("min_symmetric_lsh_alpha: cut cone limited to n <= 14");
  for (int i = 0; i < n; ++i) {
    if (std::abs(z(i, i) - 1.0) > 1e-12)
      throw std::invalid_argument("min_symmetric_lsh_alpha: diagonal must be 1");
    for (int j = 0; j < n; ++j)
      if (std::abs(z(i, j)) > 1.0 + 1e-12)
        throw std::invalid_argument("min_symmetric_lsh_alpha: entries must lie in [-1,1]");
  }

  SymmetricLshResult out;

  // D = (1 - Z)/2 over the distinct pairs
  const int pairs = n * (n - 1) / 2;
  std::vector<double> d(pairs);
  {
    int idx = 0;
    for (int x = 0; x < n; ++x)
      for (int y = x + 1; y < n; ++y) d[idx++] = (1.0 - z(x, y)) / 2.0;
  }

  // triangle inequality is necessary for cut-cone membership; check it first
  // so the common infeasible case is certified without an LP
  for (int x = 0; x < n && !out.violating_triple; ++x)
    for (int y = 0; y < n && !out.violating_triple; ++y)
      for (int w = 0; w < n; ++w) {
        auto dist = [&](int a, int b) { return (1.0 - z(a, b)) / 2.0; };
        if (dist(x, y) > dist(x, w) + dist(w, y) + 1e-12) {
          out.violating_triple = {x, y, w};
          break;
        }
      }
  if (out.violating_triple) {
    out.status = Status::infeasible;
    return out;
  }

  if (n == 1) {
    out.alpha = 1.0;  // D is empty: the constant clustering
    return out;
  }

  bool all_zero = true;
  for (double v : d) all_zero &= v == 0.0;
  if (all_zero) {
    out.alpha = 1.0;  // D = 0: single constant clustering, no cuts needed
    return out;
  }

  // canonical cuts: nonempty subsets of {1..n-1}
  const std::uint32_t num_cuts = (std::uint32_t{1} << (n - 1)) - 1;
  std::vector<std::vector<double>> columns;
  columns.reserve(num_cuts);
  std::vector<std::uint32_t> masks;
  masks.reserve(num_cuts);
  for (std::uint32_t s = 1; s <= num_cuts; ++s) {
    const std::uint32_t mask = s << 1;  // element 0 stays outside S
    std::vector<double> col(pairs);
    int idx = 0;
    for (int x = 0; x < n; ++x)
      for (int y = x + 1; y < n; ++y) {
        const bool in_x = (mask >> x) & 1, in_y = (mask >> y) & 1;
        col[idx++] = in_x != in_y ? 1.0 : 0.0;
      }
    columns.push_back(std::move(col));
    masks.push_back(mask);
  }

  LpSolution lp = solve_equality_lp(columns, d, std::vector<double>(columns.size(), 1.0));
  if (lp.status == Status::infeasible) {
    out.status = Status::infeasible;
    return out;
  }
  if (lp.status != Status::ok) {
    out.status = Status::solver_failure;
    return out;
  }

  double total = 0.0;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (lp.x[j] > 0.0) {
      out.cuts.push_back(CutWeight{masks[j], lp.x[j]});
      total += lp.x[j];
    }
  }
  out.alpha = total > 0.0 ? total : 1.0;  // all-zero decomposition: constant clustering
  out.theta = out.alpha - 1.0;
  return out;
}

}  // namespace maxlsh
