#include "coex/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace coex::diagnostics {

namespace {

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v, double mean) {
  double ss = 0.0;
  for (double x : v) {
    const double d = x - mean;
    ss += d * d;
  }
  return ss / static_cast<double>(v.size() - 1);
}

// Type-7 quantile on an already sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = p * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

double psrf(const std::vector<std::vector<double>>& chains) {
  if (chains.size() < 2) throw std::invalid_argument("psrf: need at least 2 chains");
  const std::size_t len = chains.front().size();
  for (const auto& chain : chains) {
    if (chain.size() != len) throw std::invalid_argument("psrf: chains must have equal lengths");
  }
  if (len < 4) throw std::invalid_argument("psrf: chains must have length >= 4");

  // Degenerate all-equal input.
  double lo = chains[0][0], hi = chains[0][0];
  for (const auto& chain : chains) {
    for (double x : chain) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  if (lo == hi) return 1.0;

  // Split each chain in half (middle element dropped for odd lengths).
  const std::size_t n = len / 2;
  std::vector<std::vector<double>> halves;
  halves.reserve(2 * chains.size());
  for (const auto& chain : chains) {
    halves.emplace_back(chain.begin(), chain.begin() + static_cast<std::ptrdiff_t>(n));
    halves.emplace_back(chain.end() - static_cast<std::ptrdiff_t>(n), chain.end());
  }

  const double m = static_cast<double>(halves.size());
  const double nn = static_cast<double>(n);
  std::vector<double> means(halves.size());
  double w = 0.0;
  for (std::size_t j = 0; j < halves.size(); ++j) {
    means[j] = mean_of(halves[j]);
    w += sample_variance(halves[j], means[j]);
  }
  w /= m;
  const double grand = mean_of(means);
  double b = 0.0;
  for (double mj : means) b += (mj - grand) * (mj - grand);
  b *= nn / (m - 1.0);

  if (w == 0.0) {
    return b > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  }
  const double var_plus = (nn - 1.0) / nn * w + b / nn;
  return std::sqrt(var_plus / w);
}

double mcse_batch_means(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 16) throw std::invalid_argument("mcse_batch_means: need at least 16 samples");
  double lo = series[0], hi = series[0];
  for (double x : series) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (lo == hi) return 0.0;
  const std::size_t b = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  const std::size_t a = n / b;
  const std::size_t used = a * b;

  std::vector<double> batch_means(a);
  for (std::size_t k = 0; k < a; ++k) {
    double s = 0.0;
    for (std::size_t i = k * b; i < (k + 1) * b; ++i) s += series[i];
    batch_means[k] = s / static_cast<double>(b);
  }
  const double grand = mean_of(std::span<const double>(series.data(), used));
  double ss = 0.0;
  for (double bm : batch_means) ss += (bm - grand) * (bm - grand);
  const double sigma2 = static_cast<double>(b) * ss / static_cast<double>(a - 1);
  return std::sqrt(sigma2 / static_cast<double>(used));
}

Summary summarize(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("summarize: empty sample");
  Summary out;
  out.n = samples.size();
  out.mean = mean_of(samples);
  out.sd = samples.size() >= 2 ? std::sqrt(sample_variance(samples, out.mean)) : 0.0;

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  out.q05 = quantile_sorted(sorted, 0.05);
  out.q25 = quantile_sorted(sorted, 0.25);
  out.q50 = quantile_sorted(sorted, 0.50);
  out.q75 = quantile_sorted(sorted, 0.75);
  out.q95 = quantile_sorted(sorted, 0.95);

  if (samples.size() >= 16) {
    out.mcse = mcse_batch_means(samples);
    out.mcse_defined = true;
  }
  return out;
}

CorrelationResult correlations(const std::vector<std::vector<double>>& draws) {
  if (draws.size() < 3) throw std::invalid_argument("correlations: need at least 3 draws");
  const std::size_t p = draws.front().size();
  for (const auto& row : draws) {
    if (row.size() != p) throw std::invalid_argument("correlations: ragged draw vectors");
  }
  const double n = static_cast<double>(draws.size());

  std::vector<double> means(p, 0.0);
  for (const auto& row : draws) {
    for (std::size_t j = 0; j < p; ++j) means[j] += row[j];
  }
  for (double& m : means) m /= n;

  std::vector<double> var(p, 0.0);
  std::vector<std::vector<double>> cov(p, std::vector<double>(p, 0.0));
  for (const auto& row : draws) {
    for (std::size_t j = 0; j < p; ++j) {
      const double dj = row[j] - means[j];
      var[j] += dj * dj;
      for (std::size_t k = j + 1; k < p; ++k) {
        cov[j][k] += dj * (row[k] - means[k]);
      }
    }
  }

  CorrelationResult result;
  result.matrix.assign(p, std::vector<double>(p, 0.0));
  result.zero_variance.assign(p, false);
  for (std::size_t j = 0; j < p; ++j) {
    result.matrix[j][j] = 1.0;
    if (var[j] == 0.0) result.zero_variance[j] = true;
  }
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t k = j + 1; k < p; ++k) {
      double r = 0.0;
      if (!result.zero_variance[j] && !result.zero_variance[k]) {
        r = cov[j][k] / std::sqrt(var[j] * var[k]);
        r = std::clamp(r, -1.0, 1.0);
      }
      result.matrix[j][k] = r;
      result.matrix[k][j] = r;
    }
  }
  return result;
}

}  // namespace coex::diagnostics
