// Convergence and posterior-quality diagnostics.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace coex::diagnostics {

struct Summary {
  double mean = 0.0;
  double sd = 0.0;
  double q05 = 0.0;
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
  double q95 = 0.0;
  double mcse = 0.0;
  std::size_t n = 0;
  bool mcse_defined = false;
};

// Split-chain potential scale reduction factor. Each chain is split in half
// and R-hat = sqrt(((n-1)/n * W + B/n) / W) is computed over the half-chains.
// All-constant input is defined as 1.0; W == 0 with B > 0 yields +infinity.
// Throws std::invalid_argument for fewer than 2 chains, unequal lengths, or
// chains shorter than 4.
double psrf(const std::vector<std::vector<double>>& chains);

// Batch-means Monte Carlo standard error with batch size floor(sqrt(n)).
// Throws std::invalid_argument for series shorter than 16.
double mcse_batch_means(std::span<const double> series);

// Moments, the five quantiles (type-7 interpolation) and the batch-means MCSE
// when the series is long enough (mcse_defined flags it).
Summary summarize(std::span<const double> samples);

struct CorrelationResult {
  std::vector<std::vector<double>> matrix;
  std::vector<bool> zero_variance;
};

// Pearson correlation matrix of draws (each row one draw vector). Columns with
// zero variance get zero off-diagonal entries and are flagged.
CorrelationResult correlations(const std::vector<std::vector<double>>& draws);

}  // namespace coex::diagnostics
