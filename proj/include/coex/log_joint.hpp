#pragma once

#include "coex/config.hpp"
#include "coex/data.hpp"
#include "coex/state.hpp"

namespace coex {

// Un-normalized log posterior density of the sampled state. Constants that do
// not involve sampled quantities are dropped; the Gamma normalizers of the
// tau_m/phi_m/tau_a layers are kept because the Metropolis ratio for nu_H and
// nu_F depends on them. Returns -infinity for states violating positivity.
double log_joint(const ParameterState& state, const EnsembleData& data,
                 const ReanalysisData& rean, const PriorConfig& priors,
                 const InadequacyConfig& cfg);

}  // namespace coex
