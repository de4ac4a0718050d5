#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "lp_reference.hpp"
#include "maxlsh/krivine.hpp"
#include "maxlsh/maxnorm.hpp"
#include "maxlsh/ratio.hpp"
#include "maxlsh/rng.hpp"

using namespace maxlsh;

namespace {

Matrix random_half_integer(int n, int m, Rng& rng) {
  Matrix z(n, m);
  for (double& v : z.data()) v = 0.5 * (static_cast<double>(static_cast<int>(rng.below(5))) - 2.0);
  return z;
}

std::set<std::vector<double>> kappa_set(const std::vector<IncidencePair>& pairs) {
  std::set<std::vector<double>> out;
  for (const auto& p : pairs) out.insert(p.kappa.data());
  return out;
}

}  // namespace

TEST_CASE("incidence enumeration basics", "[ratio]") {
  SECTION("1x1 binary: match or mismatch") {
    auto pairs = enumerate_incidence(1, 1, 2);
    REQUIRE(pairs.size() == 2);
    auto set = kappa_set(pairs);
    REQUIRE(set.count({1.0}) == 1);
    REQUIRE(set.count({-1.0}) == 1);
  }
  SECTION("2x1 ternary: all four sign columns") {
    auto pairs = enumerate_incidence(2, 1, 3);
    auto set = kappa_set(pairs);
    REQUIRE(set.size() == 4);
    for (double a : {-1.0, 1.0})
      for (double b : {-1.0, 1.0}) REQUIRE(set.count({a, b}) == 1);
  }
  SECTION("2x2 binary dedupes to the rank-one sign matrices") {
    auto pairs = enumerate_incidence(2, 2, 2);
    REQUIRE(pairs.size() == 8);  // uv^T with u, v in {+-1}^2, u v^T == (-u)(-v)^T
    for (const auto& p : pairs) {
      REQUIRE(p.kappa(0, 0) * p.kappa(1, 1) == p.kappa(0, 1) * p.kappa(1, 0));
    }
  }
  SECTION("cap enforcement") {
    EnumerationOptions opt;
    opt.cap = 100;
    REQUIRE_THROWS_AS(enumerate_incidence(3, 3, 4, opt), TooLargeError);
  }
  SECTION("alphabet clamp is exact") {
    // the clamp may not change the set of distinct incidence matrices
    EnumerationOptions clamped, full;
    full.clamp_alphabet = false;
    full.cap = std::uint64_t{1} << 30;
    clamped.cap = full.cap;
    for (int k : {4, 5, 6}) {
      auto a = kappa_set(enumerate_incidence(2, 3, k, clamped));
      auto b = kappa_set(enumerate_incidence(2, 3, k, full));
      REQUIRE(a == b);
    }
  }
}

TEST_CASE("cluster ratio reference values", "[ratio]") {
  SECTION("any incidence matrix has ratio 1") {
    auto p = incidence_from_labels(Labeling({0, 1, 0}, 2), Labeling({1, 1, 0}, 2));
    auto cert = cluster_ratio(SimMatrix(p.kappa), 2, false);
    REQUIRE(cert.status == Status::ok);
    REQUIRE(cert.value == Catch::Approx(1.0).margin(1e-9));
  }
  SECTION("zero matrix has ratio 0 by convention") {
    auto cert = cluster_ratio(SimMatrix(Matrix(3, 3)), 2, false);
    REQUIRE(cert.status == Status::ok);
    REQUIRE(cert.value == 0.0);
    REQUIRE(cert.weights.empty());
  }
  SECTION("2x2 identity sits inside the Theorem 1 bracket") {
    auto z = SimMatrix(Matrix::identity(2));
    auto cert = cluster_ratio(z, 2, false);
    REQUIRE(cert.status == Status::ok);
    const double t = max_norm(z).t;
    const double kr = krivine_constant();
    REQUIRE(cert.value >= t / 3.0 - 1e-6);
    REQUIRE(cert.value <= kr * t + 1e-6);
  }
}

TEST_CASE("certificate replay", "[ratio]") {
  Rng rng(41);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(2));
    Matrix z = random_half_integer(n, n, rng);
    for (bool centralized : {false, true}) {
      auto cert = cluster_ratio(SimMatrix(z), 2, centralized);
      REQUIRE(cert.status == Status::ok);
      REQUIRE(certificate_residual(cert, SimMatrix(z)) <= 1e-7);
      double sum = 0.0;
      for (const auto& [pair, mu] : cert.weights) {
        REQUIRE(mu >= 0.0);
        sum += mu;
      }
      REQUIRE(sum == Catch::Approx(cert.value).margin(1e-9));
      if (!centralized) REQUIRE(cert.theta == 0.0);
      // weak duality companion
      REQUIRE(cert.dual_value <= cert.value + 1e-7);
    }
  }
}

TEST_CASE("ratio monotonicity and saturation", "[ratio]") {
  Rng rng(43);
  EnumerationOptions full;
  full.clamp_alphabet = false;
  full.cap = std::uint64_t{1} << 24;
  for (int trial = 0; trial < 4; ++trial) {
    Matrix z = random_half_integer(3, 3, rng);
    for (bool centralized : {false, true}) {
      double prev = 1e300;
      for (int k : {2, 3, 4}) {
        auto cert = cluster_ratio(SimMatrix(z), k, centralized);
        REQUIRE(cert.status == Status::ok);
        REQUIRE(cert.value <= prev + 1e-8);
        prev = cert.value;
      }
      // alphabet beyond n+m adds no incidence patterns (checked without the
      // clamp so the enumeration itself is the witness)
      auto at_sat = cluster_ratio(SimMatrix(z), 6, centralized, full);
      auto beyond = cluster_ratio(SimMatrix(z), 7, centralized, full);
      REQUIRE(at_sat.value == Catch::Approx(beyond.value).margin(1e-8));
    }
  }
}

TEST_CASE("centralization and binary reduction inequalities", "[ratio]") {
  Rng rng(47);
  for (int trial = 0; trial < 6; ++trial) {
    Matrix z = random_half_integer(2 + static_cast<int>(rng.below(2)), 2, rng);
    const int ninf = z.rows() + z.cols();
    auto plain = cluster_ratio(SimMatrix(z), 2, false);
    auto centered = cluster_ratio(SimMatrix(z), 2, true);
    REQUIRE(centered.value <= plain.value + 1e-8);
    auto inf_centered = cluster_ratio(SimMatrix(z), ninf, true);
    REQUIRE(centered.value <= 2.0 * inf_centered.value + 1e-8);
  }
}

TEST_CASE("simplex matches vertex enumeration on the ratio LP", "[ratio]") {
  Rng rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix z = random_half_integer(2, 2, rng);
    auto pairs = enumerate_incidence(2, 2, 2);
    std::vector<std::vector<double>> cols;
    for (const auto& p : pairs) cols.push_back(p.kappa.data());
    std::vector<double> b = z.data();
    std::vector<double> c(cols.size(), 1.0);
    auto ref = maxlsh_test::reference_lp(cols, b, c);
    auto cert = cluster_ratio(SimMatrix(z), 2, false);
    REQUIRE(ref.feasible);
    REQUIRE(cert.value == Catch::Approx(ref.objective).margin(1e-7));
  }
}

TEST_CASE("symmetric lsh alpha via the cut cone", "[ratio]") {
  SECTION("clustering incidence needs a single unit of cuts") {
    auto p = incidence_from_labels(Labeling({0, 0, 1, 1}, 2), Labeling({0, 0, 1, 1}, 2));
    auto res = min_symmetric_lsh_alpha(SimMatrix(p.kappa));
    REQUIRE(res.status == Status::ok);
    REQUIRE(res.alpha == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(res.cuts.size() == 1);
    REQUIRE(res.theta == Catch::Approx(0.0).margin(1e-9));
  }
  SECTION("all ones needs no cuts at all") {
    auto res = min_symmetric_lsh_alpha(SimMatrix(Matrix(3, 3, 1.0)));
    REQUIRE(res.status == Status::ok);
    REQUIRE(res.alpha == 1.0);
    REQUIRE(res.cuts.empty());
  }
  SECTION("obtuse Gram triple is infeasible with a certificate") {
    const double s = 1.0 / std::sqrt(2.0);
    Matrix x{{1, 0}, {0, 1}, {s, s}};
    Matrix z(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double v = 0.0;
        for (int k = 0; k < 2; ++k) v += x(i, k) * x(j, k);
        z(i, j) = v;
      }
    for (int i = 0; i < 3; ++i) z(i, i) = 1.0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) z(j, i) = z(i, j);
    auto res = min_symmetric_lsh_alpha(SimMatrix(z));
    REQUIRE(res.status == Status::infeasible);
    REQUIRE(res.violating_triple.has_value());
  }
  SECTION("feasible decompositions replay exactly") {
    auto p = incidence_from_labels(Labeling({0, 1, 0, 2}, 3), Labeling({0, 1, 0, 2}, 3));
    auto res = min_symmetric_lsh_alpha(SimMatrix(p.kappa));
    REQUIRE(res.status == Status::ok);
    const int n = 4;
    // alpha E[kappa] - (alpha - 1) = Z recovered from the finite cut support
    Matrix recovered(n, n, res.alpha);
    for (const auto& cut : res.cuts)
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
          const bool in_x = (cut.subset >> x) & 1, in_y = (cut.subset >> y) & 1;
          if (in_x != in_y) recovered(x, y) -= 2.0 * cut.lambda;
        }
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        REQUIRE(recovered(x, y) - res.theta == Catch::Approx(p.kappa(x, y)).margin(1e-9));
  }
  SECTION("preconditions") {
    REQUIRE_THROWS_AS(min_symmetric_lsh_alpha(SimMatrix(Matrix{{1.0, 2.0}, {2.0, 1.0}})),
                      std::invalid_argument);  // entries outside [-1,1]
    REQUIRE_THROWS_AS(min_symmetric_lsh_alpha(SimMatrix(Matrix{{0.5}})),
                      std::invalid_argument);  // diagonal not 1
  }
}
