#include "coex/state.hpp"

#include <cmath>

namespace coex {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

bool ParameterState::positivity_ok() const {
  if (!std::isfinite(mu_h) || !std::isfinite(mu_f) || !std::isfinite(beta)) return false;
  if (!positive_finite(tau_h) || !positive_finite(tau_f_given_h)) return false;
  if (!positive_finite(psi2) || !positive_finite(theta2)) return false;
  if (!positive_finite(nu_h) || !positive_finite(nu_f)) return false;
  if (!positive_finite(tau_a) || !positive_finite(tau_w)) return false;
  if (!std::isfinite(y_h) || !std::isfinite(y_ha) || !std::isfinite(mu_w)) return false;
  const std::size_t m = x_hm.size();
  if (x_fm.size() != m || tau_m.size() != m || phi_m.size() != m) return false;
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(x_hm[i]) || !std::isfinite(x_fm[i])) return false;
    if (!positive_finite(tau_m[i]) || !positive_finite(phi_m[i])) return false;
  }
  return true;
}

DerivedPrecisions derived(const ParameterState& state, const InadequacyConfig& cfg) {
  const double k2 = cfg.kappa * cfg.kappa;
  const double kw2 = cfg.kappa_w * cfg.kappa_w;
  DerivedPrecisions d;
  d.tau_delta_h = state.tau_h / k2;
  d.tau_delta_f = state.tau_f_given_h / k2;
  d.tau_delta_w = state.tau_w / kw2;
  d.nu_ha = state.nu_h / k2;
  d.nu_fa = state.nu_f / k2;
  return d;
}

}  // namespace coex
