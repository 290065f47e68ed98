// Machinery for trusting the sampler: synthetic data generation from the
// generative hierarchy, leave-one-out cross-validation with PIT and
// Kolmogorov-Smirnov uniformity, the ensemble-regression baseline, the
// analytic dilution/shrinkage formulas, and the correctness suites
// (conditional-vs-joint grid oracle, joint-distribution simulator test).
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coex/config.hpp"
#include "coex/data.hpp"
#include "coex/gibbs.hpp"
#include "coex/rng.hpp"
#include "coex/state.hpp"

namespace coex::validation {

struct ConvergenceFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Design {
  std::vector<std::size_t> hist_runs;
  std::vector<std::size_t> fut_runs;
  std::size_t n_reanalysis = 4;

  std::size_t model_count() const { return hist_runs.size(); }

  // The 13-model ensemble of the reference application: 50 historical and
  // 39 future runs, 4 reanalyses.
  static Design reference();
  static Design uniform(std::size_t models, std::size_t runs_hist, std::size_t runs_fut,
                        std::size_t n_reanalysis);
};

struct SyntheticTruth {
  double mu_h = 0.0;
  double mu_f = 4.0;
  double beta = 0.7;
  double tau_h = 1.0;
  double tau_f_given_h = 2.0;
  double psi2 = 0.1;
  double theta2 = 1.0;
  double nu_h = 8.0;
  double nu_f = 8.0;
  double tau_w = 1.0;
  InadequacyConfig inad;
  Design design;
};

struct SyntheticLatents {
  std::vector<double> x_hm;
  std::vector<double> x_fm;
  std::vector<double> tau_m;
  std::vector<double> phi_m;
  double y_h = 0.0;
  double y_ha = 0.0;
  double tau_a = 1.0;
  double mu_w = 0.0;
};

struct SyntheticDataset {
  EnsembleData ensemble;
  ReanalysisData reanalysis;
  SyntheticLatents latents;
};

SyntheticDataset generate_synthetic(const SyntheticTruth& truth, std::uint64_t seed);

// Data layer draws given a latent state: used by generate_synthetic and by the
// successive-conditional simulator of the joint test.
EnsembleData draw_runs(const ParameterState& s, const Design& design,
                       const std::vector<std::string>& model_ids, Rng& rng);
ReanalysisData draw_reanalysis(const ParameterState& s, std::size_t n, Rng& rng);

enum class CvMode { kAllData, kFutureOnly };

// Probability integral transform with the midpoint tie rule:
// (#below + 0.5*#equal + 0.5) / (S + 1), always inside the open interval.
double pit_midpoint(std::span<const double> predictive, double observed);

// Leave-one-out cross validation: refit without each model (or without its
// future runs), draw the predictive response of a new exchangeable model per
// kept posterior draw, and return the probability integral transform of the
// held-out model's observed mean response. Ties use the midpoint rule
// (#below + 0.5*#equal + 0.5)/(S+1). Throws ConvergenceFailure if a refit
// fails to converge.
std::vector<std::pair<std::string, double>> loo_cv_pit(const EnsembleData& data,
                                                       const ReanalysisData& rean,
                                                       const PriorConfig& priors,
                                                       const InadequacyConfig& inad,
                                                       const ChainConfig& cfg, CvMode mode);

// Two-sided one-sample Kolmogorov-Smirnov p-value against Uniform(0,1),
// exact-form distribution valid at small sample sizes. Values outside [0,1]
// are rejected with std::invalid_argument.
double ks_uniform_pvalue(std::span<const double> pits);

// Simple linear regression of model mean responses on model mean historical
// climates.
struct ERFit {
  double beta_prime_hat = 0.0;
  double mean_response = 0.0;   // intercept at the grand mean historical climate
  double mean_hist = 0.0;

  double projected_response_at(double z) const {
    return mean_response + beta_prime_hat * (z - mean_hist);
  }
};

ERFit ensemble_regression(const EnsembleData& data);

// Expected value of the ensemble-regression slope under internal variability:
// (beta' * sigma_h2 - sigma2/runs) / (sigma_h2 + sigma2/runs).
double dilution_expectation(double beta_prime, double sigma_h2, double sigma2, double runs);

// Slope shrinkage induced by an additive marginal discrepancy term:
// kappa^2*sigma_h2 / (kappa^2*sigma_h2 + d_h2) * beta.
double coexchangeable_shrinkage(double beta, double kappa, double sigma_h2, double d_h2);

// Conditional-vs-joint oracle: for each closed-form full conditional, compare
// the normalized closed form against the normalized exp(log_joint) slice on a
// 200-point grid (+-6 SD for Normal conditionals, the 1e-6..0.999999 quantile
// range for Gamma ones) at n_states random states/datasets.
struct GridCheckResult {
  std::string name;
  double max_rel_err = 0.0;
};
std::vector<GridCheckResult> conditional_grid_check(std::uint64_t seed, int n_states,
                                                    int n_grid = 200);

// Joint-distribution simulator test: compares moments of test functions under
// the marginal-conditional simulator (prior, then data) and the
// successive-conditional simulator (sweep alternated with data redraw) on a
// small design. Test functions use logs of positive parameters and
// standardized residuals of location layers so that all compared moments are
// finite.
struct GewekeResult {
  std::vector<std::string> names;  // one per test function moment
  std::vector<double> z;
};
GewekeResult geweke_joint_test(std::size_t n_draws, std::uint64_t seed);

}  // namespace coex::validation
