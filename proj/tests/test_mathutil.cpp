#include <doctest.h>

#include <cmath>

#include "coex/mathutil.hpp"
#include "coex/rng.hpp"

using namespace coex;

TEST_CASE("regularized incomplete gamma agrees with the exponential closed form") {
  // shape 1 => CDF(x) = 1 - exp(-x)
  for (double x : {0.1, 0.5, 1.0, 3.0, 10.0}) {
    CHECK(gamma_cdf(x, 1.0, 1.0) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-12));
  }
}

TEST_CASE("gamma quantile inverts the cdf") {
  for (double shape : {0.4, 1.0, 3.5, 20.0}) {
    for (double p : {1e-6, 0.01, 0.5, 0.99, 0.999999}) {
      const double q = gamma_quantile(p, shape, 2.0);
      CHECK(gamma_cdf(q, shape, 2.0) == doctest::Approx(p).epsilon(1e-8));
    }
  }
}

TEST_CASE("chi-square upper tail matches reference values") {
  CHECK(chi_square_sf(3.841458820694124, 1.0) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(chi_square_sf(18.307038053275146, 10.0) == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("rng streams are deterministic and separated") {
  Rng a(42, 7), b(42, 7), c(42, 8);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x > 0.0);
    CHECK(x <= 1.0);
  }
  bool differs = false;
  Rng a2(42, 7);
  for (int i = 0; i < 10; ++i) {
    if (a2.uniform() != c.uniform()) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("rng gamma and normal moments") {
  Rng rng(123);
  const int n = 200000;
  double sum_g = 0.0, sum_g2 = 0.0, sum_n = 0.0, sum_n2 = 0.0;
  const double shape = 3.5, rate = 2.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gamma(shape, rate);
    sum_g += g;
    sum_g2 += g * g;
    const double z = rng.normal();
    sum_n += z;
    sum_n2 += z * z;
  }
  const double mean_g = sum_g / n;
  const double var_g = sum_g2 / n - mean_g * mean_g;
  CHECK(mean_g == doctest::Approx(shape / rate).epsilon(0.01));
  CHECK(var_g == doctest::Approx(shape / (rate * rate)).epsilon(0.03));
  CHECK(sum_n / n == doctest::Approx(0.0).scale(1.0).epsilon(0.01));
  CHECK(sum_n2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("rng gamma handles shapes below one") {
  Rng rng(5);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gamma(0.5, 1.0);
    CHECK(g > 0.0);
    sum += g;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
}
