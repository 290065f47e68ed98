// Closed-form full conditional distributions of the Gibbs blocks.
//
// Every update draws from one of these; the grid oracle in the validation
// module checks each against a normalized slice of log_joint, so any
// transcription error here is caught by a single property.
#pragma once

#include <cstddef>

#include "coex/config.hpp"
#include "coex/data.hpp"
#include "coex/state.hpp"

namespace coex::gibbs {

struct NormalCond {
  double mean;
  double precision;
};

struct GammaCond {
  double shape;
  double rate;
};

// System block: scanned in the order y_ha, y_h, tau_a.
NormalCond y_ha_conditional(const ParameterState& s, const InadequacyConfig& cfg);
NormalCond y_h_conditional(const ParameterState& s, const InadequacyConfig& cfg);
GammaCond tau_a_conditional(const ParameterState& s, const InadequacyConfig& cfg);

// Reanalysis block.
NormalCond mu_w_conditional(const ParameterState& s, const ReanalysisData& rean,
                            const InadequacyConfig& cfg);
GammaCond tau_w_conditional(const ParameterState& s, const ReanalysisData& rean,
                            const PriorConfig& priors, const InadequacyConfig& cfg);

// Latent model states, one model at a time.
NormalCond x_fm_conditional(const ParameterState& s, const EnsembleData& data, std::size_t m);
NormalCond x_hm_conditional(const ParameterState& s, const EnsembleData& data, std::size_t m);
GammaCond tau_m_conditional(const ParameterState& s, const EnsembleData& data, std::size_t m);
GammaCond phi_m_conditional(const ParameterState& s, const EnsembleData& data, std::size_t m);

// Ensemble parameters, scanned mu_h, mu_f, beta, tau_h, tau_f, psi2, theta2.
NormalCond mu_h_conditional(const ParameterState& s, const PriorConfig& priors,
                            const InadequacyConfig& cfg);
NormalCond mu_f_conditional(const ParameterState& s, const PriorConfig& priors);
NormalCond beta_conditional(const ParameterState& s, const PriorConfig& priors);
GammaCond tau_h_conditional(const ParameterState& s, const PriorConfig& priors,
                            const InadequacyConfig& cfg);
GammaCond tau_f_conditional(const ParameterState& s, const PriorConfig& priors);
GammaCond psi2_conditional(const ParameterState& s, const PriorConfig& priors,
                           const InadequacyConfig& cfg);
GammaCond theta2_conditional(const ParameterState& s, const PriorConfig& priors,
                             const InadequacyConfig& cfg);

// Log likelihood factors of the degrees-of-freedom (everything in the joint
// that varies with nu, normalizers included), plus the prior kernel.
double nu_h_log_target(const ParameterState& s, double nu_h, const PriorConfig& priors,
                       const InadequacyConfig& cfg);
double nu_f_log_target(const ParameterState& s, double nu_f, const PriorConfig& priors);

}  // namespace coex::gibbs
