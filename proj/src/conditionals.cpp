#include "coex/conditionals.hpp"

#include <cmath>

#include "coex/mathutil.hpp"

namespace coex::gibbs {

namespace {

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

double sum_sq_dev(const std::vector<double>& v, double center) {
  double s = 0.0;
  for (double x : v) {
    const double d = x - center;
    s += d * d;
  }
  return s;
}

}  // namespace

NormalCond y_ha_conditional(const ParameterState& s, const InadequacyConfig& cfg) {
  const DerivedPrecisions d = derived(s, cfg);
  const double prec = s.tau_a + d.tau_delta_w;
  return {(s.tau_a * s.y_h + d.tau_delta_w * s.mu_w) / prec, prec};
}

NormalCond y_h_conditional(const ParameterState& s, const InadequacyConfig& cfg) {
  const DerivedPrecisions d = derived(s, cfg);
  const double prec = d.tau_delta_h + s.tau_a;
  return {(d.tau_delta_h * s.mu_h + s.tau_a * s.y_ha) / prec, prec};
}

GammaCond tau_a_conditional(const ParameterState& s, const InadequacyConfig& cfg) {
  const DerivedPrecisions d = derived(s, cfg);
  const double r = s.y_ha - s.y_h;
  return {0.5 * (d.nu_ha + 1.0), 0.5 * (d.nu_ha * s.psi2 + r * r)};
}

NormalCond mu_w_conditional(const ParameterState& s, const ReanalysisData& rean,
                            const InadequacyConfig& cfg) {
  const DerivedPrecisions d = derived(s, cfg);
  const double n = static_cast<double>(rean.size());
  const double prec = s.tau_w * n + d.tau_delta_w;
  return {(s.tau_w * sum(rean.values) + d.tau_delta_w * s.y_ha) / prec, prec};
}

GammaCond tau_w_conditional(const ParameterState& s, const ReanalysisData& rean,
                            const PriorConfig& priors, const InadequacyConfig& cfg) {
  const double n = static_cast<double>(rean.size());
  const double rw = s.mu_w - s.y_ha;
  const double kw2 = cfg.kappa_w * cfg.kappa_w;
  return {priors.a_tau_w + 0.5 * (n + 1.0),
          priors.b_tau_w + 0.5 * sum_sq_dev(rean.values, s.mu_w) + 0.5 * rw * rw / kw2};
}

NormalCond x_fm_conditional(const ParameterState& s, const EnsembleData& data, std::size_t m) {
  const ModelRuns& runs = data.models[m];
  const double tau_fut = s.phi_m[m] * s.tau_m[m];
  const double n_f = static_cast<double>(runs.fut_runs.size());
  const double prec = s.tau_f_given_h + tau_fut * n_f;
  const double pull = s.tau_f_given_h * (s.mu_f + s.beta * (s.x_hm[m] - s.mu_h));
  return {(pull + tau_fut * sum(runs.fut_runs)) / prec, prec};
}

NormalCond x_hm_conditional(const ParameterState& s, const EnsembleData& data, std::size_t m) {
  const ModelRuns& runs = data.models[m];
  const double n_h = static_cast<double>(runs.hist_runs.size());
  const double tf = s.tau_f_given_h;
  const double prec = s.tau_h + tf * s.beta * s.beta + s.tau_m[m] * n_h;
  const double num = s.tau_h * s.mu_h + tf * s.beta * (s.x_fm[m] - s.mu_f + s.beta * s.mu_h) +
                     s.tau_m[m] * sum(runs.hist_runs);
  return {num / prec, prec};
}

GammaCond tau_m_conditional(const ParameterState& s, const EnsembleData& data, std::size_t m) {
  const ModelRuns& runs = data.models[m];
  const double n_h = static_cast<double>(runs.hist_runs.size());
  const double n_f = static_cast<double>(runs.fut_runs.size());
  const double ss_h = sum_sq_dev(runs.hist_runs, s.x_hm[m]);
  const double ss_f = sum_sq_dev(runs.fut_runs, s.x_fm[m]);
  return {0.5 * (s.nu_h + n_h + n_f), 0.5 * (s.nu_h * s.psi2 + ss_h + s.phi_m[m] * ss_f)};
}

GammaCond phi_m_conditional(const ParameterState& s, const EnsembleData& data, std::size_t m) {
  const ModelRuns& runs = data.models[m];
  const double n_f = static_cast<double>(runs.fut_runs.size());
  const double ss_f = sum_sq_dev(runs.fut_runs, s.x_fm[m]);
  return {0.5 * (s.nu_f + n_f), 0.5 * (s.nu_f * s.theta2 + s.tau_m[m] * ss_f)};
}

NormalCond mu_h_conditional(const ParameterState& s, const PriorConfig& pr,
                            const InadequacyConfig& cfg) {
  const DerivedPrecisions d = derived(s, cfg);
  const double mm = static_cast<double>(s.model_count());
  const double tf = s.tau_f_given_h;
  const double prec = pr.b_mu_h + pr.b_mu_f + s.tau_h * mm + tf * s.beta * s.beta * mm +
                      d.tau_delta_h;
  double sum_xh = 0.0;
  double sum_resid = 0.0;  // sum of (x_fm - mu_f - beta*x_hm)
  for (std::size_t m = 0; m < s.model_count(); ++m) {
    sum_xh += s.x_hm[m];
    sum_resid += s.x_fm[m] - s.mu_f - s.beta * s.x_hm[m];
  }
  const double num = pr.b_mu_h * pr.a_mu_h + pr.b_mu_f * s.mu_f + s.tau_h * sum_xh -
                     tf * s.beta * sum_resid + d.tau_delta_h * s.y_h;
  return {num / prec, prec};
}

NormalCond mu_f_conditional(const ParameterState& s, const PriorConfig& pr) {
  const double mm = static_cast<double>(s.model_count());
  const double tf = s.tau_f_given_h;
  const double prec = pr.b_mu_f + tf * mm;
  double acc = 0.0;
  for (std::size_t m = 0; m < s.model_count(); ++m) {
    acc += s.x_fm[m] - s.beta * (s.x_hm[m] - s.mu_h);
  }
  return {(pr.b_mu_f * s.mu_h + tf * acc) / prec, prec};
}

NormalCond beta_conditional(const ParameterState& s, const PriorConfig& pr) {
  const double tf = s.tau_f_given_h;
  double sum_hh = 0.0;
  double sum_hf = 0.0;
  for (std::size_t m = 0; m < s.model_count(); ++m) {
    const double dh = s.x_hm[m] - s.mu_h;
    sum_hh += dh * dh;
    sum_hf += dh * (s.x_fm[m] - s.mu_f);
  }
  const double prec = pr.b_beta + tf * sum_hh;
  return {(pr.b_beta * pr.a_beta + tf * sum_hf) / prec, prec};
}

GammaCond tau_h_conditional(const ParameterState& s, const PriorConfig& pr,
                            const InadequacyConfig& cfg) {
  const double mm = static_cast<double>(s.model_count());
  const double k2 = cfg.kappa * cfg.kappa;
  double ss = 0.0;
  for (std::size_t m = 0; m < s.model_count(); ++m) {
    const double d = s.x_hm[m] - s.mu_h;
    ss += d * d;
  }
  const double ry = s.y_h - s.mu_h;
  return {pr.a_tau_h + 0.5 * (mm + 1.0), pr.b_tau_h + 0.5 * (ss + ry * ry / k2)};
}

GammaCond tau_f_conditional(const ParameterState& s, const PriorConfig& pr) {
  const double mm = static_cast<double>(s.model_count());
  double ss = 0.0;
  for (std::size_t m = 0; m < s.model_count(); ++m) {
    const double r = s.x_fm[m] - s.mu_f - s.beta * (s.x_hm[m] - s.mu_h);
    ss += r * r;
  }
  return {pr.a_tau_f + 0.5 * mm, pr.b_tau_f + 0.5 * ss};
}

GammaCond psi2_conditional(const ParameterState& s, const PriorConfig& pr,
                           const InadequacyConfig& cfg) {
  const DerivedPrecisions d = derived(s, cfg);
  const double mm = static_cast<double>(s.model_count());
  const double sum_tau = sum(s.tau_m);
  return {pr.a_psi2 + 0.5 * (s.nu_h * mm + d.nu_ha),
          pr.b_psi2 + 0.5 * (s.nu_h * sum_tau + d.nu_ha * s.tau_a)};
}

GammaCond theta2_conditional(const ParameterState& s, const PriorConfig& pr,
                             const InadequacyConfig& cfg) {
  (void)cfg;
  const double mm = static_cast<double>(s.model_count());
  return {pr.a_theta2 + 0.5 * s.nu_f * mm, pr.b_theta2 + 0.5 * s.nu_f * sum(s.phi_m)};
}

double nu_h_log_target(const ParameterState& s, double nu_h, const PriorConfig& pr,
                       const InadequacyConfig& cfg) {
  if (!(nu_h > 0.0) || !std::isfinite(nu_h)) return kNegInf;
  const double k2 = cfg.kappa * cfg.kappa;
  const double nu_ha = nu_h / k2;
  double lp = gamma_lpdf(s.tau_a, 0.5 * nu_ha, 0.5 * nu_ha * s.psi2);
  const double alpha = 0.5 * nu_h;
  const double rate = 0.5 * nu_h * s.psi2;
  const double mm = static_cast<double>(s.model_count());
  double sum_log = 0.0, sum_tau = 0.0;
  for (double tau : s.tau_m) {
    sum_log += std::log(tau);
    sum_tau += tau;
  }
  lp += mm * (alpha * std::log(rate) - std::lgamma(alpha)) + (alpha - 1.0) * sum_log -
        rate * sum_tau;
  lp += (pr.a_nu_h - 1.0) * std::log(nu_h) - pr.b_nu_h * nu_h;
  return lp;
}

double nu_f_log_target(const ParameterState& s, double nu_f, const PriorConfig& pr) {
  if (!(nu_f > 0.0) || !std::isfinite(nu_f)) return kNegInf;
  const double alpha = 0.5 * nu_f;
  const double rate = 0.5 * nu_f * s.theta2;
  const double mm = static_cast<double>(s.model_count());
  double sum_log = 0.0, sum_phi = 0.0;
  for (double phi : s.phi_m) {
    sum_log += std::log(phi);
    sum_phi += phi;
  }
  double lp = mm * (alpha * std::log(rate) - std::lgamma(alpha)) + (alpha - 1.0) * sum_log -
              rate * sum_phi;
  lp += (pr.a_nu_f - 1.0) * std::log(nu_f) - pr.b_nu_f * nu_f;
  return lp;
}

}  // namespace coex::gibbs
