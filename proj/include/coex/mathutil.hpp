// Scalar density/distribution helpers shared by the sampler and the test oracles.
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace coex {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

inline double normal_lpdf(double x, double mean, double precision) {
  const double d = x - mean;
  return 0.5 * std::log(precision) - 0.5 * precision * d * d - kLogSqrt2Pi;
}

// Gamma(shape, rate) log density, including normalizing constant.
inline double gamma_lpdf(double x, double shape, double rate) {
  if (x <= 0.0) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

// Regularized lower incomplete gamma P(a, x): series expansion for x < a+1,
// continued fraction (modified Lentz) otherwise.
inline double reg_gamma_p(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("reg_gamma_p: shape must be positive");
  if (x <= 0.0) return 0.0;
  const double lga = std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 1000; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - lga);
  }
  // Lentz continued fraction for Q(a, x)
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  const double q = std::exp(-x + a * std::log(x) - lga) * h;
  return 1.0 - q;
}

inline double gamma_cdf(double x, double shape, double rate) {
  if (x <= 0.0) return 0.0;
  return reg_gamma_p(shape, rate * x);
}

// Upper tail probability of a chi-square variable with k degrees of freedom.
inline double chi_square_sf(double x, double k) {
  if (x <= 0.0) return 1.0;
  return 1.0 - reg_gamma_p(0.5 * k, 0.5 * x);
}

// Quantile of Gamma(shape, rate) by bisection on the regularized CDF.
inline double gamma_quantile(double p, double shape, double rate) {
  if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("gamma_quantile: p in (0,1) required");
  double lo = 0.0;
  double hi = std::max(1.0, shape / rate);
  while (gamma_cdf(hi, shape, rate) < p) {
    hi *= 2.0;
    if (hi > 1e300) break;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (gamma_cdf(mid, shape, rate) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace coex
