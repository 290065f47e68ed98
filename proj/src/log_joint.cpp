#include "coex/log_joint.hpp"

#include <cmath>

#include "coex/mathutil.hpp"

namespace coex {

double log_joint(const ParameterState& s, const EnsembleData& data, const ReanalysisData& rean,
                 const PriorConfig& pr, const InadequacyConfig& cfg) {
  if (!s.positivity_ok() || s.model_count() != data.model_count()) return kNegInf;

  const DerivedPrecisions d = derived(s, cfg);
  double lp = 0.0;

  // Reanalysis outputs given reanalysis parameters.
  for (double w : rean.values) {
    const double r = w - s.mu_w;
    lp += 0.5 * std::log(s.tau_w) - 0.5 * s.tau_w * r * r;
  }

  // System state given ensemble and reanalysis parameters. The Gamma
  // normalizer of tau_a is kept: it carries nu_h and psi2.
  {
    const double rh = s.y_h - s.mu_h;
    lp += 0.5 * std::log(d.tau_delta_h) - 0.5 * d.tau_delta_h * rh * rh;
    const double ra = s.y_ha - s.y_h;
    lp += 0.5 * std::log(s.tau_a) - 0.5 * s.tau_a * ra * ra;
    lp += gamma_lpdf(s.tau_a, 0.5 * d.nu_ha, 0.5 * d.nu_ha * s.psi2);
  }

  // Model outputs given latent model states.
  for (std::size_t m = 0; m < data.model_count(); ++m) {
    const ModelRuns& runs = data.models[m];
    const double tau = s.tau_m[m];
    const double tau_fut = s.phi_m[m] * tau;
    for (double x : runs.hist_runs) {
      const double r = x - s.x_hm[m];
      lp += 0.5 * std::log(tau) - 0.5 * tau * r * r;
    }
    for (double x : runs.fut_runs) {
      const double r = x - s.x_fm[m];
      lp += 0.5 * std::log(tau_fut) - 0.5 * tau_fut * r * r;
    }
  }

  // Latent model states given ensemble parameters; Gamma normalizers kept.
  for (std::size_t m = 0; m < data.model_count(); ++m) {
    const double rh = s.x_hm[m] - s.mu_h;
    lp += 0.5 * std::log(s.tau_h) - 0.5 * s.tau_h * rh * rh;
    const double rf = s.x_fm[m] - s.mu_f - s.beta * rh;
    lp += 0.5 * std::log(s.tau_f_given_h) - 0.5 * s.tau_f_given_h * rf * rf;
    lp += gamma_lpdf(s.tau_m[m], 0.5 * s.nu_h, 0.5 * s.nu_h * s.psi2);
    lp += gamma_lpdf(s.phi_m[m], 0.5 * s.nu_f, 0.5 * s.nu_f * s.theta2);
  }

  // Ensemble parameter priors (kernels only; hyperparameter constants drop).
  {
    const double rmh = s.mu_h - pr.a_mu_h;
    const double rmf = s.mu_f - s.mu_h;
    const double rb = s.beta - pr.a_beta;
    lp += -0.5 * pr.b_mu_h * rmh * rmh - 0.5 * pr.b_mu_f * rmf * rmf - 0.5 * pr.b_beta * rb * rb;
    lp += (pr.a_tau_h - 1.0) * std::log(s.tau_h) - pr.b_tau_h * s.tau_h;
    lp += (pr.a_tau_f - 1.0) * std::log(s.tau_f_given_h) - pr.b_tau_f * s.tau_f_given_h;
    lp += (pr.a_nu_h - 1.0) * std::log(s.nu_h) - pr.b_nu_h * s.nu_h;
    lp += (pr.a_nu_f - 1.0) * std::log(s.nu_f) - pr.b_nu_f * s.nu_f;
    lp += (pr.a_psi2 - 1.0) * std::log(s.psi2) - pr.b_psi2 * s.psi2;
    lp += (pr.a_theta2 - 1.0) * std::log(s.theta2) - pr.b_theta2 * s.theta2;
  }

  // Reanalysis parameter priors.
  {
    const double rw = s.mu_w - s.y_ha;
    lp += 0.5 * std::log(d.tau_delta_w) - 0.5 * d.tau_delta_w * rw * rw;
    lp += (pr.a_tau_w - 1.0) * std::log(s.tau_w) - pr.b_tau_w * s.tau_w;
  }

  return lp;
}

}  // namespace coex
