// Hyperparameter and sampler configuration.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace coex {

// Conjugate prior hyperparameters. Normal priors are (center, precision);
// Gamma priors are (shape, rate). The nu priors default to exponentials with
// rate 1/M, so the full default set depends on the ensemble size.
struct PriorConfig {
  double a_mu_h = 0.0;
  double b_mu_h = 1e-6;
  double b_mu_f = 1e-6;
  double a_beta = 1.0;
  double b_beta = 1e-6;
  double a_tau_h = 1e-3;
  double b_tau_h = 1e-3;
  double a_tau_f = 1e-3;
  double b_tau_f = 1e-3;
  double a_psi2 = 1e-3;
  double b_psi2 = 1e-3;
  double a_theta2 = 1e-3;
  double b_theta2 = 1e-3;
  double a_nu_h = 1.0;
  double b_nu_h = 1.0 / 13.0;
  double a_nu_f = 1.0;
  double b_nu_f = 1.0 / 13.0;
  double a_tau_w = 1e-3;
  double b_tau_w = 1e-3;

  static PriorConfig defaults_for(std::size_t model_count) {
    PriorConfig p;
    p.b_nu_h = 1.0 / static_cast<double>(model_count);
    p.b_nu_f = 1.0 / static_cast<double>(model_count);
    return p;
  }

  std::vector<std::string> violations() const;
};

// Discrepancy inflation. kappa scales the ensemble layer, kappa_w the
// reanalysis layer; both are fixed a priori.
struct InadequacyConfig {
  double kappa = 1.2;
  double kappa_w = 1.2;

  std::vector<std::string> violations() const;
};

struct ChainConfig {
  std::size_t n_chains = 4;
  std::size_t iters_initial = 20000;
  std::size_t burn_in = 10000;
  std::size_t extend_by = 10000;
  std::size_t thin = 40;
  double psrf_threshold = 1.10;
  std::size_t max_total_iters = 200000;
  double lambda_h = 2.0;
  double lambda_f = 2.0;
  bool adapt_lambda = true;
  std::uint64_t base_seed = 0;

  std::vector<std::string> violations() const;
};

}  // namespace coex
