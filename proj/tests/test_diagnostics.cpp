#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "coex/diagnostics.hpp"
#include "coex/rng.hpp"

using namespace coex;
using namespace coex::diagnostics;

TEST_CASE("psrf conventions and sanity") {
  SUBCASE("identical constant chains") {
    std::vector<std::vector<double>> chains(3, std::vector<double>(20, 2.5));
    CHECK(psrf(chains) == 1.0);
  }

  SUBCASE("constant but different chains give the infinity sentinel") {
    std::vector<std::vector<double>> chains{std::vector<double>(8, 1.0),
                                            std::vector<double>(8, 2.0)};
    CHECK(std::isinf(psrf(chains)));
  }

  SUBCASE("well mixed chains are close to one") {
    Rng rng(77);
    std::vector<std::vector<double>> chains(4);
    for (auto& chain : chains) {
      chain.reserve(10000);
      for (int i = 0; i < 10000; ++i) chain.push_back(rng.normal());
    }
    CHECK(psrf(chains) < 1.02);
  }

  SUBCASE("separated chains are flagged hard") {
    Rng rng(78);
    std::vector<std::vector<double>> chains(2);
    for (int i = 0; i < 1000; ++i) {
      chains[0].push_back(rng.normal(0.0, 1.0));
      chains[1].push_back(rng.normal(100.0, 1.0));
    }
    CHECK(psrf(chains) > 10.0);
  }

  SUBCASE("unequal lengths rejected") {
    std::vector<std::vector<double>> chains{std::vector<double>(8, 1.0),
                                            std::vector<double>(9, 1.0)};
    CHECK_THROWS_AS(psrf(chains), std::invalid_argument);
  }

  SUBCASE("invariant under a common affine map") {
    Rng rng(79);
    std::vector<std::vector<double>> chains(3);
    for (auto& chain : chains) {
      for (int i = 0; i < 500; ++i) chain.push_back(rng.normal(rng.uniform(), 1.0));
    }
    const double base = psrf(chains);
    for (auto& chain : chains) {
      for (double& x : chain) x = 3.5 * x - 11.0;
    }
    CHECK(psrf(chains) == doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("batch-means mcse") {
  SUBCASE("constant series") {
    std::vector<double> series(100, 4.2);
    CHECK(mcse_batch_means(series) == 0.0);
  }

  SUBCASE("iid standard normal length 1e6") {
    Rng rng(80);
    std::vector<double> series(1000000);
    for (double& x : series) x = rng.normal();
    const double se = mcse_batch_means(series);
    CHECK(se == doctest::Approx(1e-3).epsilon(0.2));
  }

  SUBCASE("autocorrelation inflates the error") {
    Rng rng(81);
    const double rho = 0.9;
    std::vector<double> series(100000);
    double x = 0.0;
    for (double& v : series) {
      x = rho * x + std::sqrt(1.0 - rho * rho) * rng.normal();
      v = x;
    }
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(series.size());
    double var = 0.0;
    for (double v : series) var += (v - mean) * (v - mean);
    var /= static_cast<double>(series.size() - 1);
    const double iid_se = std::sqrt(var / static_cast<double>(series.size()));
    CHECK(mcse_batch_means(series) > 2.0 * iid_se);
  }

  SUBCASE("short series rejected") {
    std::vector<double> series(15, 1.0);
    CHECK_THROWS_AS(mcse_batch_means(series), std::invalid_argument);
  }
}

TEST_CASE("summarize") {
  SUBCASE("degenerate sample") {
    std::vector<double> v{1.0, 1.0, 1.0};
    const Summary s = summarize(v);
    CHECK(s.mean == 1.0);
    CHECK(s.sd == 0.0);
    CHECK(s.q05 == 1.0);
    CHECK(s.q95 == 1.0);
    CHECK_FALSE(s.mcse_defined);
    CHECK(s.mcse == 0.0);
  }

  SUBCASE("type-7 median of 1..100") {
    std::vector<double> v(100);
    for (int i = 0; i < 100; ++i) v[static_cast<std::size_t>(i)] = i + 1.0;
    const Summary s = summarize(v);
    CHECK(s.q50 == doctest::Approx(50.5));
    CHECK(s.q05 == doctest::Approx(5.95));
    CHECK(s.q25 == doctest::Approx(25.75));
  }

  SUBCASE("merged mean equals the weighted per-chain mean") {
    Rng rng(82);
    std::vector<double> a(300), b(500);
    for (double& x : a) x = rng.normal(1.0, 2.0);
    for (double& x : b) x = rng.normal(-1.0, 2.0);
    std::vector<double> merged(a);
    merged.insert(merged.end(), b.begin(), b.end());
    const double expected =
        (summarize(a).mean * 300.0 + summarize(b).mean * 500.0) / 800.0;
    CHECK(summarize(merged).mean == doctest::Approx(expected).epsilon(1e-12));
  }

  SUBCASE("additive shift moves location statistics only") {
    Rng rng(83);
    std::vector<double> v(5000);
    for (double& x : v) x = rng.normal(0.4, 1.7);
    const Summary base = summarize(v);
    for (double& x : v) x += 10.0;
    const Summary shifted = summarize(v);
    CHECK(shifted.mean == doctest::Approx(base.mean + 10.0).epsilon(1e-10));
    CHECK(shifted.q50 == doctest::Approx(base.q50 + 10.0).epsilon(1e-10));
    CHECK(shifted.sd == doctest::Approx(base.sd).epsilon(1e-9));
    CHECK(shifted.mcse == doctest::Approx(base.mcse).epsilon(1e-9));
  }
}

TEST_CASE("correlations") {
  SUBCASE("self correlation and exact anti-linearity") {
    std::vector<std::vector<double>> draws;
    Rng rng(84);
    for (int i = 0; i < 50; ++i) {
      const double x = rng.normal();
      draws.push_back({x, -2.0 * x + 3.0});
    }
    const CorrelationResult r = correlations(draws);
    CHECK(r.matrix[0][0] == 1.0);
    CHECK(r.matrix[1][1] == 1.0);
    CHECK(r.matrix[0][1] == doctest::Approx(-1.0).epsilon(1e-12));
  }

  SUBCASE("bivariate normal correlation recovered") {
    Rng rng(85);
    const double rho = 0.7;
    std::vector<std::vector<double>> draws;
    draws.reserve(100000);
    for (int i = 0; i < 100000; ++i) {
      const double z1 = rng.normal();
      const double z2 = rng.normal();
      draws.push_back({z1, rho * z1 + std::sqrt(1.0 - rho * rho) * z2});
    }
    const CorrelationResult r = correlations(draws);
    CHECK(r.matrix[0][1] == doctest::Approx(rho).epsilon(0.015));
  }

  SUBCASE("zero-variance column flagged with zero off-diagonals") {
    std::vector<std::vector<double>> draws{{1.0, 5.0}, {2.0, 5.0}, {3.0, 5.0}};
    const CorrelationResult r = correlations(draws);
    CHECK(r.zero_variance[1]);
    CHECK_FALSE(r.zero_variance[0]);
    CHECK(r.matrix[0][1] == 0.0);
    CHECK(r.matrix[1][1] == 1.0);
  }

  SUBCASE("invariant under per-column positive affine maps") {
    Rng rng(86);
    std::vector<std::vector<double>> draws;
    for (int i = 0; i < 2000; ++i) {
      const double x = rng.normal();
      draws.push_back({x, 0.5 * x + rng.normal(), rng.normal()});
    }
    const CorrelationResult base = correlations(draws);
    for (auto& row : draws) {
      row[0] = 4.0 * row[0] + 1.0;
      row[1] = 0.25 * row[1] - 9.0;
      row[2] = 7.0 * row[2];
    }
    const CorrelationResult mapped = correlations(draws);
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        CHECK(mapped.matrix[j][k] == doctest::Approx(base.matrix[j][k]).epsilon(1e-9));
      }
    }
  }
}
