#include <catch2/catch_amalgamated.hpp>

#include "maxlsh/rng.hpp"
#include "maxlsh/simcore.hpp"

using namespace maxlsh;

TEST_CASE("incidence matrices from labelings", "[simcore]") {
  SECTION("shared binary clustering is block diagonal") {
    auto p = incidence_from_labels(Labeling({0, 0, 1}, 2), Labeling({0, 0, 1}, 2));
    Matrix expect{{1, 1, -1}, {1, 1, -1}, {-1, -1, 1}};
    REQUIRE(p.kappa.equals_exactly(expect));
    REQUIRE(p.kappa.is_symmetric());
  }
  SECTION("crossed binary labelings") {
    auto p = incidence_from_labels(Labeling({0, 1}, 2), Labeling({1, 0}, 2));
    Matrix expect{{-1, 1}, {1, -1}};
    REQUIRE(p.kappa.equals_exactly(expect));
  }
  SECTION("ternary asymmetric pair") {
    auto p = incidence_from_labels(Labeling({0, 1, 2}, 3), Labeling({0, 0, 2}, 3));
    Matrix expect{{1, 1, -1}, {-1, -1, -1}, {-1, -1, 1}};
    REQUIRE(p.kappa.equals_exactly(expect));
  }
  SECTION("labels outside the alphabet are rejected") {
    REQUIRE_THROWS_AS(Labeling({0, 2}, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(Labeling({-1}, 2), std::invalid_argument);
  }
}

TEST_CASE("incidence is invariant under alphabet relabeling", "[simcore]") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(4));
    const int m = 1 + static_cast<int>(rng.below(4));
    const int k = 2 + static_cast<int>(rng.below(3));
    std::vector<int> f(n), g(m);
    for (int& v : f) v = static_cast<int>(rng.below(k));
    for (int& v : g) v = static_cast<int>(rng.below(k));
    // random permutation of the alphabet
    std::vector<int> perm(k);
    for (int i = 0; i < k; ++i) perm[i] = i;
    for (int i = k - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    std::vector<int> fp(n), gp(m);
    for (int i = 0; i < n; ++i) fp[i] = perm[f[i]];
    for (int j = 0; j < m; ++j) gp[j] = perm[g[j]];
    auto base = incidence_from_labels(Labeling(f, k), Labeling(g, k));
    auto relabeled = incidence_from_labels(Labeling(fp, k), Labeling(gp, k));
    REQUIRE(base.kappa.equals_exactly(relabeled.kappa));
  }
}

TEST_CASE("binary incidence equals the sign outer product", "[simcore]") {
  // exhaustive over all binary labeling pairs up to 4x4
  for (int n = 1; n <= 4; ++n)
    for (int m = 1; m <= 4; ++m)
      for (int fc = 0; fc < (1 << n); ++fc)
        for (int gc = 0; gc < (1 << m); ++gc) {
          std::vector<int> f(n), g(m);
          for (int i = 0; i < n; ++i) f[i] = (fc >> i) & 1;
          for (int j = 0; j < m; ++j) g[j] = (gc >> j) & 1;
          auto p = incidence_from_labels(Labeling(f, 2), Labeling(g, 2));
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) {
              const double u = f[i] == 0 ? 1.0 : -1.0;
              const double v = g[j] == 0 ? 1.0 : -1.0;
              REQUIRE(p.kappa(i, j) == u * v);
            }
        }
}

TEST_CASE("theorem2 matrix construction", "[simcore]") {
  SECTION("n = 2 collapses to all ones") {
    Matrix expect{{1, 1}, {1, 1}};
    REQUIRE(theorem2_matrix(2).values.equals_exactly(expect));
  }
  SECTION("n = 4 block form") {
    Matrix expect{{1, -1, 1, 1}, {-1, 1, 1, 1}, {1, 1, 1, -1}, {1, 1, -1, 1}};
    REQUIRE(theorem2_matrix(4).values.equals_exactly(expect));
  }
  SECTION("odd or nonpositive n rejected") {
    REQUIRE_THROWS_AS(theorem2_matrix(3), std::invalid_argument);
    REQUIRE_THROWS_AS(theorem2_matrix(0), std::invalid_argument);
    REQUIRE_THROWS_AS(theorem2_matrix(-2), std::invalid_argument);
  }
  SECTION("smallest eigenvalue is 2 - n") {
    REQUIRE(spectrum(theorem2_matrix(6)).lambda_min == Catch::Approx(-4.0).margin(1e-9));
  }
}

TEST_CASE("theorem2 spectrum across sizes", "[simcore]") {
  for (int n : {2, 4, 6, 8}) {
    auto sp = spectrum(theorem2_matrix(n));
    REQUIRE(sp.lambda_min == Catch::Approx(2.0 - n).margin(1e-9));
    double trace = 0.0;
    for (double ev : sp.eigenvalues) trace += ev;
    REQUIRE(trace == Catch::Approx(static_cast<double>(n)).margin(1e-8 * n));
    // the rest of the spectrum is a flat 2
    for (std::size_t i = 1; i < sp.eigenvalues.size(); ++i)
      REQUIRE(sp.eigenvalues[i] == Catch::Approx(2.0).margin(1e-9));
  }
}

TEST_CASE("spectrum of simple matrices", "[simcore]") {
  SECTION("identity") {
    auto sp = spectrum(SimMatrix(Matrix::identity(3)));
    for (double ev : sp.eigenvalues) REQUIRE(ev == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("2x2 correlation") {
    auto sp = spectrum(SimMatrix(Matrix{{1.0, 0.5}, {0.5, 1.0}}));
    REQUIRE(sp.eigenvalues[0] == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(sp.eigenvalues[1] == Catch::Approx(1.5).margin(1e-12));
  }
  SECTION("non-symmetric input rejected") {
    REQUIRE_THROWS_AS(spectrum(Matrix{{1.0, 2.0}, {0.0, 1.0}}), std::invalid_argument);
  }
  SECTION("eigenvalue sum matches the trace on random symmetric matrices") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 2 + static_cast<int>(rng.below(7));
      Matrix z(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) z(i, j) = z(j, i) = rng.uniform(-2.0, 2.0);
      auto sp = spectrum(z);
      double sum = 0.0;
      for (double ev : sp.eigenvalues) sum += ev;
      REQUIRE(sum == Catch::Approx(z.trace()).margin(1e-8 * n * std::max(1.0, z.max_abs())));
      REQUIRE(std::is_sorted(sp.eigenvalues.begin(), sp.eigenvalues.end()));
    }
  }
}

TEST_CASE("approximation error metrics", "[simcore]") {
  SimMatrix z(Matrix{{1.0, -1.0}});
  SimMatrix zero(Matrix{{0.0, 0.0}});
  REQUIRE(approximation_error(z, z, ErrorMetric::mean_abs) == 0.0);
  REQUIRE(approximation_error(z, z, ErrorMetric::mse) == 0.0);
  REQUIRE(approximation_error(z, z, ErrorMetric::max_abs) == 0.0);
  REQUIRE(approximation_error(z, zero, ErrorMetric::mean_abs) == Catch::Approx(1.0));
  REQUIRE(approximation_error(z, zero, ErrorMetric::mse) == Catch::Approx(1.0));
  REQUIRE(approximation_error(z, zero, ErrorMetric::max_abs) == Catch::Approx(1.0));
  REQUIRE_THROWS_AS(approximation_error(z.values, Matrix(2, 2), ErrorMetric::mse),
                    std::invalid_argument);
}

TEST_CASE("sim matrix validation", "[simcore]") {
  REQUIRE_THROWS_AS(SimMatrix(Matrix{{1.0, std::nan("")}}), std::invalid_argument);
  REQUIRE(SimMatrix(Matrix{{1.0, 0.5}, {0.5, 1.0}}).is_symmetric);
  REQUIRE_FALSE(SimMatrix(Matrix{{1.0, 0.5}, {0.4999999999, 1.0}}).is_symmetric);
}
