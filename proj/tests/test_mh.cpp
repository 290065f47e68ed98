#include <doctest.h>

#include <cmath>
#include <vector>

#include "coex/diagnostics.hpp"
#include "coex/gibbs.hpp"
#include "coex/mathutil.hpp"

using namespace coex;
using namespace coex::gibbs;

namespace {

// Stub target used by the detailed-balance rig.
double stub_shape = 3.0;
double stub_rate = 2.0;
double stub_target(double x) { return gamma_lpdf(x, stub_shape, stub_rate); }

}  // namespace

TEST_CASE("identity proposal has exactly zero log ratio and accepts") {
  auto target = [](double x) { return gamma_lpdf(x, 5.0, 1.0); };
  for (double v : {0.3, 1.0, 7.5, 40.0}) {
    for (double lambda : {0.5, 2.0, 8.0}) {
      CHECK(mh_log_ratio(v, v, lambda, target) == 0.0);
    }
  }
}

TEST_CASE("chain histogram matches the stubbed gamma target") {
  Rng rng(301);
  auto target = [](double x) { return stub_target(x); };
  const std::size_t steps = 100000;
  const std::size_t thin = 25;
  double x = 1.0;
  std::vector<double> kept;
  kept.reserve(steps / thin);
  for (std::size_t i = 0; i < steps; ++i) {
    x = mh_gamma_step(x, 2.0, target, rng).value;
    if ((i + 1) % thin == 0) kept.push_back(x);
  }

  // Chi-square goodness of fit over 20 equiprobable bins.
  const int bins = 20;
  std::vector<double> edges(static_cast<std::size_t>(bins - 1));
  for (int b = 1; b < bins; ++b) {
    edges[static_cast<std::size_t>(b - 1)] =
        gamma_quantile(static_cast<double>(b) / bins, stub_shape, stub_rate);
  }
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (double v : kept) {
    int b = 0;
    while (b < bins - 1 && v > edges[static_cast<std::size_t>(b)]) ++b;
    counts[static_cast<std::size_t>(b)] += 1.0;
  }
  const double expected = static_cast<double>(kept.size()) / bins;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  const double p = chi_square_sf(chi2, bins - 1);
  INFO("chi2 = " << chi2 << ", p = " << p);
  CHECK(p > 0.01);
}

TEST_CASE("empirical acceptance matches the stationary rate") {
  // Independent oracle: start states drawn iid from the target, one proposal
  // each, acceptance probability averaged directly.
  Rng oracle_rng(302);
  auto target = [](double x) { return stub_target(x); };
  const double lambda = 2.0;
  const std::size_t n = 100000;
  double theo_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = oracle_rng.gamma(stub_shape, stub_rate);
    const double y = oracle_rng.gamma(x * lambda, lambda);
    const double lr = mh_log_ratio(x, y, lambda, target);
    theo_sum += std::min(1.0, std::exp(lr));
  }
  const double theo = theo_sum / static_cast<double>(n);

  Rng chain_rng(303);
  double x = stub_shape / stub_rate;
  std::vector<double> acc;
  acc.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const MhStep step = mh_gamma_step(x, lambda, target, chain_rng);
    x = step.value;
    acc.push_back(step.accepted ? 1.0 : 0.0);
  }
  double emp = 0.0;
  for (double a : acc) emp += a;
  emp /= static_cast<double>(n);

  const double se_theo = 0.5 / std::sqrt(static_cast<double>(n));
  const double se_emp = diagnostics::mcse_batch_means(acc);
  const double z = (emp - theo) / std::sqrt(se_theo * se_theo + se_emp * se_emp);
  INFO("empirical " << emp << " theoretical " << theo << " z " << z);
  CHECK(std::abs(z) < 3.0);
}

TEST_CASE("acceptance rate increases with lambda") {
  auto target = [](double x) { return gamma_lpdf(x, 5.0, 1.0); };
  double prev = -1.0;
  for (double lambda : {0.5, 2.0, 8.0}) {
    Rng rng(304);
    double x = 5.0;
    std::size_t accepted = 0;
    const std::size_t n = 40000;
    for (std::size_t i = 0; i < n; ++i) {
      const MhStep step = mh_gamma_step(x, lambda, target, rng);
      x = step.value;
      if (step.accepted) ++accepted;
    }
    const double rate = static_cast<double>(accepted) / n;
    INFO("lambda " << lambda << " rate " << rate);
    CHECK(rate > prev);
    prev = rate;
  }
}
