// Independent re-derivation of the joint density used as a test oracle.
//
// Deliberately written from the generative model edge by edge with fully
// normalized densities and without reusing anything from log_joint.cpp; it
// agrees with the production function only up to a state-independent
// constant, so tests compare differences between two states.
#pragma once

#include <cmath>

#include "coex/config.hpp"
#include "coex/data.hpp"
#include "coex/state.hpp"

namespace coex::testing {

inline double oracle_normal(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * std::log(2.0 * M_PI * variance) - 0.5 * d * d / variance;
}

inline double oracle_gamma(double x, double shape, double rate) {
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

inline double oracle_log_joint(const ParameterState& s, const EnsembleData& data,
                               const ReanalysisData& rean, const PriorConfig& pr,
                               const InadequacyConfig& cfg) {
  const double k2 = cfg.kappa * cfg.kappa;
  const double kw2 = cfg.kappa_w * cfg.kappa_w;
  double lp = 0.0;

  // Priors on the ensemble parameters.
  lp += oracle_normal(s.mu_h, pr.a_mu_h, 1.0 / pr.b_mu_h);
  lp += oracle_normal(s.mu_f, s.mu_h, 1.0 / pr.b_mu_f);
  lp += oracle_normal(s.beta, pr.a_beta, 1.0 / pr.b_beta);
  lp += oracle_gamma(s.tau_h, pr.a_tau_h, pr.b_tau_h);
  lp += oracle_gamma(s.tau_f_given_h, pr.a_tau_f, pr.b_tau_f);
  lp += oracle_gamma(s.psi2, pr.a_psi2, pr.b_psi2);
  lp += oracle_gamma(s.theta2, pr.a_theta2, pr.b_theta2);
  lp += oracle_gamma(s.nu_h, pr.a_nu_h, pr.b_nu_h);
  lp += oracle_gamma(s.nu_f, pr.a_nu_f, pr.b_nu_f);
  lp += oracle_gamma(s.tau_w, pr.a_tau_w, pr.b_tau_w);

  // Latent model states and their runs.
  for (std::size_t m = 0; m < data.model_count(); ++m) {
    lp += oracle_gamma(s.tau_m[m], 0.5 * s.nu_h, 0.5 * s.nu_h * s.psi2);
    lp += oracle_gamma(s.phi_m[m], 0.5 * s.nu_f, 0.5 * s.nu_f * s.theta2);
    lp += oracle_normal(s.x_hm[m], s.mu_h, 1.0 / s.tau_h);
    lp += oracle_normal(s.x_fm[m], s.mu_f + s.beta * (s.x_hm[m] - s.mu_h),
                        1.0 / s.tau_f_given_h);
    for (double x : data.models[m].hist_runs) {
      lp += oracle_normal(x, s.x_hm[m], 1.0 / s.tau_m[m]);
    }
    for (double x : data.models[m].fut_runs) {
      lp += oracle_normal(x, s.x_fm[m], 1.0 / (s.phi_m[m] * s.tau_m[m]));
    }
  }

  // System layer.
  lp += oracle_normal(s.y_h, s.mu_h, k2 / s.tau_h);
  lp += oracle_gamma(s.tau_a, 0.5 * s.nu_h / k2, 0.5 * (s.nu_h / k2) * s.psi2);
  lp += oracle_normal(s.y_ha, s.y_h, 1.0 / s.tau_a);

  // Reanalysis layer.
  lp += oracle_normal(s.mu_w, s.y_ha, kw2 / s.tau_w);
  for (double w : rean.values) {
    lp += oracle_normal(w, s.mu_w, 1.0 / s.tau_w);
  }
  return lp;
}

}  // namespace coex::testing
