// Latent state of the hierarchical model, in the precision parametrization.
#pragma once

#include <cstddef>
#include <vector>

#include "coex/config.hpp"

namespace coex {

// One complete point of the sampled latent space. Variance-scale quantities
// are stored as precisions (tau_f_given_h is the precision of the conditional
// response spread). Per-model vectors all have length M.
struct ParameterState {
  double mu_h = 0.0;
  double mu_f = 0.0;
  double beta = 1.0;
  double tau_h = 1.0;
  double tau_f_given_h = 1.0;
  double psi2 = 1.0;
  double theta2 = 1.0;
  double nu_h = 1.0;
  double nu_f = 1.0;

  std::vector<double> x_hm;
  std::vector<double> x_fm;
  std::vector<double> tau_m;
  std::vector<double> phi_m;

  double y_h = 0.0;
  double y_ha = 0.0;
  double tau_a = 1.0;

  double mu_w = 0.0;
  double tau_w = 1.0;

  static ParameterState sized(std::size_t model_count) {
    ParameterState s;
    s.x_hm.assign(model_count, 0.0);
    s.x_fm.assign(model_count, 0.0);
    s.tau_m.assign(model_count, 1.0);
    s.phi_m.assign(model_count, 1.0);
    return s;
  }

  std::size_t model_count() const { return x_hm.size(); }

  // All precision-like quantities and the degrees-of-freedom strictly positive,
  // vectors consistently sized.
  bool positivity_ok() const;
};

// Precisions implied by the inadequacy inflation.
struct DerivedPrecisions {
  double tau_delta_h = 0.0;
  double tau_delta_f = 0.0;
  double tau_delta_w = 0.0;
  double nu_ha = 0.0;
  double nu_fa = 0.0;
};

DerivedPrecisions derived(const ParameterState& state, const InadequacyConfig& cfg);

// Joint draw of the purely predictive quantities.
struct PredictiveDraw {
  double y_f = 0.0;
  double y_fa = 0.0;
  double phi_a = 1.0;
};

}  // namespace coex
