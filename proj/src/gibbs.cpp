#include "coex/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coex/diagnostics.hpp"
#include "coex/mathutil.hpp"

namespace coex::gibbs {

namespace {

constexpr double kPrecisionFloor = 1e-8;
constexpr double kPrecisionCeil = 1e8;
constexpr double kTargetAcceptance = 0.44;

double clamp_positive(double x) {
  if (!std::isfinite(x) || x <= 0.0) return 1.0;
  return std::clamp(x, kPrecisionFloor, kPrecisionCeil);
}

double mean_of(const std::vector<double>& v, double fallback) {
  if (v.empty()) return fallback;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v, 0.0);
  double ss = 0.0;
  for (double x : v) {
    const double d = x - m;
    ss += d * d;
  }
  return ss / static_cast<double>(v.size() - 1);
}

}  // namespace

ParameterState init_center_state(const EnsembleData& data, const ReanalysisData& rean,
                                 const PriorConfig& priors, const InadequacyConfig& cfg) {
  (void)cfg;
  const std::size_t mm = data.model_count();
  ParameterState s = ParameterState::sized(mm);

  // Grand means over all runs.
  double sum_h = 0.0, sum_f = 0.0;
  std::size_t n_h = 0, n_f = 0;
  for (const auto& model : data.models) {
    for (double x : model.hist_runs) {
      sum_h += x;
      ++n_h;
    }
    for (double x : model.fut_runs) {
      sum_f += x;
      ++n_f;
    }
  }
  const double grand_h = n_h > 0 ? sum_h / static_cast<double>(n_h) : 0.0;
  const double grand_f = n_f > 0 ? sum_f / static_cast<double>(n_f) : grand_h;
  s.mu_h = grand_h;
  s.mu_f = grand_f;

  // Per-model run means and pooled within-model variances.
  std::vector<double> mean_h(mm), mean_f(mm);
  double pooled_ss_h = 0.0, pooled_df_h = 0.0;
  double pooled_ss_f = 0.0, pooled_df_f = 0.0;
  for (std::size_t m = 0; m < mm; ++m) {
    const ModelRuns& runs = data.models[m];
    mean_h[m] = mean_of(runs.hist_runs, grand_h);
    mean_f[m] = mean_of(runs.fut_runs, grand_f);
    if (runs.hist_runs.size() >= 2) {
      pooled_ss_h += sample_variance(runs.hist_runs) * static_cast<double>(runs.hist_runs.size() - 1);
      pooled_df_h += static_cast<double>(runs.hist_runs.size() - 1);
    }
    if (runs.fut_runs.size() >= 2) {
      pooled_ss_f += sample_variance(runs.fut_runs) * static_cast<double>(runs.fut_runs.size() - 1);
      pooled_df_f += static_cast<double>(runs.fut_runs.size() - 1);
    }
  }
  double pooled_var_h = pooled_df_h > 0.0 ? pooled_ss_h / pooled_df_h : sample_variance(mean_h);
  if (!(pooled_var_h > 0.0)) pooled_var_h = 1.0;
  double pooled_var_f = pooled_df_f > 0.0 ? pooled_ss_f / pooled_df_f : pooled_var_h;
  if (!(pooled_var_f > 0.0)) pooled_var_f = pooled_var_h;

  // OLS slope of future means on historical means.
  double var_mh = sample_variance(mean_h);
  double beta_hat = priors.a_beta;
  double resid_var = 0.0;
  if (var_mh > 0.0 && n_f > 0) {
    const double c_h = mean_of(mean_h, 0.0);
    const double c_f = mean_of(mean_f, 0.0);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t m = 0; m < mm; ++m) {
      sxy += (mean_h[m] - c_h) * (mean_f[m] - c_f);
      sxx += (mean_h[m] - c_h) * (mean_h[m] - c_h);
    }
    beta_hat = sxy / sxx;
    for (std::size_t m = 0; m < mm; ++m) {
      const double r = (mean_f[m] - c_f) - beta_hat * (mean_h[m] - c_h);
      resid_var += r * r;
    }
    resid_var /= static_cast<double>(mm);
  }
  s.beta = std::isfinite(beta_hat) ? beta_hat : priors.a_beta;

  s.tau_h = clamp_positive(var_mh > 0.0 ? 1.0 / var_mh : 1.0 / pooled_var_h);
  s.tau_f_given_h = clamp_positive(resid_var > 0.0 ? 1.0 / resid_var : s.tau_h);

  double sum_tau = 0.0, sum_phi = 0.0;
  for (std::size_t m = 0; m < mm; ++m) {
    const ModelRuns& runs = data.models[m];
    double var_h = runs.hist_runs.size() >= 2 ? sample_variance(runs.hist_runs) : pooled_var_h;
    if (!(var_h > 0.0)) var_h = pooled_var_h;
    double var_f = runs.fut_runs.size() >= 2 ? sample_variance(runs.fut_runs) : pooled_var_f;
    if (!(var_f > 0.0)) var_f = pooled_var_f;
    s.tau_m[m] = clamp_positive(1.0 / var_h);
    s.phi_m[m] = clamp_positive(var_h / var_f);
    s.x_hm[m] = mean_h[m];
    s.x_fm[m] = runs.fut_runs.empty() ? s.mu_f + s.beta * (mean_h[m] - s.mu_h) : mean_f[m];
    sum_tau += s.tau_m[m];
    sum_phi += s.phi_m[m];
  }
  s.psi2 = clamp_positive(static_cast<double>(mm) / sum_tau);
  s.theta2 = clamp_positive(static_cast<double>(mm) / sum_phi);

  s.nu_h = static_cast<double>(std::max<std::size_t>(mm, 2));
  s.nu_f = s.nu_h;

  const double mean_w = mean_of(rean.values, grand_h);
  s.mu_w = mean_w;
  s.y_ha = mean_w;
  s.y_h = mean_w;
  const double var_w = sample_variance(rean.values);
  s.tau_w = clamp_positive(var_w > 0.0 ? 1.0 / var_w : s.tau_h);
  s.tau_a = clamp_positive(1.0 / s.psi2);
  return s;
}

ParameterState init_chain_state(const EnsembleData& data, const ReanalysisData& rean,
                                const PriorConfig& priors, const InadequacyConfig& cfg,
                                std::uint64_t seed, std::size_t chain_index) {
  ParameterState s = init_center_state(data, rean, priors, cfg);
  Rng rng(seed, chain_index, /*substream=*/0);

  // Location offsets of up to two pooled SDs of the run values.
  double scale = 0.0;
  std::size_t n = 0;
  for (const auto& model : data.models) {
    for (double x : model.hist_runs) {
      const double d = x - s.mu_h;
      scale += d * d;
      ++n;
    }
  }
  double sd_pool = n > 1 ? std::sqrt(scale / static_cast<double>(n - 1)) : 1.0;
  if (!(sd_pool > 0.0)) sd_pool = 1.0;

  auto offset = [&](double& x, double width) { x += width * (2.0 * rng.uniform() - 1.0); };
  auto inflate = [&](double& x) {
    x = clamp_positive(x * std::exp(std::log(4.0) * (2.0 * rng.uniform() - 1.0)));
  };

  offset(s.mu_h, 2.0 * sd_pool);
  offset(s.mu_f, 2.0 * sd_pool);
  offset(s.beta, 1.0);
  offset(s.y_h, 2.0 * sd_pool);
  offset(s.y_ha, 2.0 * sd_pool);
  offset(s.mu_w, 2.0 * sd_pool);
  for (double& x : s.x_hm) offset(x, 2.0 * sd_pool);
  for (double& x : s.x_fm) offset(x, 2.0 * sd_pool);
  inflate(s.tau_h);
  inflate(s.tau_f_given_h);
  inflate(s.psi2);
  inflate(s.theta2);
  inflate(s.nu_h);
  inflate(s.nu_f);
  inflate(s.tau_a);
  inflate(s.tau_w);
  for (double& x : s.tau_m) inflate(x);
  for (double& x : s.phi_m) inflate(x);
  return s;
}

void update_system_block(ParameterState& s, const InadequacyConfig& cfg, Rng& rng) {
  const NormalCond cya = y_ha_conditional(s, cfg);
  s.y_ha = rng.normal_prec(cya.mean, cya.precision);
  const NormalCond cy = y_h_conditional(s, cfg);
  s.y_h = rng.normal_prec(cy.mean, cy.precision);
  const GammaCond cta = tau_a_conditional(s, cfg);
  s.tau_a = rng.gamma(cta.shape, cta.rate);
}

void update_reanalysis_block(ParameterState& s, const ReanalysisData& rean,
                             const PriorConfig& priors, const InadequacyConfig& cfg, Rng& rng) {
  const NormalCond cmw = mu_w_conditional(s, rean, cfg);
  s.mu_w = rng.normal_prec(cmw.mean, cmw.precision);
  const GammaCond ctw = tau_w_conditional(s, rean, priors, cfg);
  s.tau_w = rng.gamma(ctw.shape, ctw.rate);
}

void update_model_block(ParameterState& s, const EnsembleData& data, Rng& rng) {
  for (std::size_t m = 0; m < s.model_count(); ++m) {
    const NormalCond cf = x_fm_conditional(s, data, m);
    s.x_fm[m] = rng.normal_prec(cf.mean, cf.precision);
    const NormalCond ch = x_hm_conditional(s, data, m);
    s.x_hm[m] = rng.normal_prec(ch.mean, ch.precision);
    const GammaCond ct = tau_m_conditional(s, data, m);
    s.tau_m[m] = rng.gamma(ct.shape, ct.rate);
    const GammaCond cp = phi_m_conditional(s, data, m);
    s.phi_m[m] = rng.gamma(cp.shape, cp.rate);
  }
}

void update_ensemble_block(ParameterState& s, const EnsembleData& data, const PriorConfig& priors,
                           const InadequacyConfig& cfg, Rng& rng) {
  (void)data;
  const NormalCond cmh = mu_h_conditional(s, priors, cfg);
  s.mu_h = rng.normal_prec(cmh.mean, cmh.precision);
  const NormalCond cmf = mu_f_conditional(s, priors);
  s.mu_f = rng.normal_prec(cmf.mean, cmf.precision);
  const NormalCond cb = beta_conditional(s, priors);
  s.beta = rng.normal_prec(cb.mean, cb.precision);
  const GammaCond cth = tau_h_conditional(s, priors, cfg);
  s.tau_h = rng.gamma(cth.shape, cth.rate);
  const GammaCond ctf = tau_f_conditional(s, priors);
  s.tau_f_given_h = rng.gamma(ctf.shape, ctf.rate);
  const GammaCond cps = psi2_conditional(s, priors, cfg);
  s.psi2 = rng.gamma(cps.shape, cps.rate);
  const GammaCond cth2 = theta2_conditional(s, priors, cfg);
  s.theta2 = rng.gamma(cth2.shape, cth2.rate);
}

double mh_log_ratio(double current, double proposed, double lambda,
                    const std::function<double(double)>& log_target) {
  return log_target(proposed) - log_target(current) +
         gamma_lpdf(current, proposed * lambda, lambda) -
         gamma_lpdf(proposed, current * lambda, lambda);
}

MhStep mh_gamma_step(double current, double lambda, const std::function<double(double)>& log_target,
                     Rng& rng) {
  const double proposed = rng.gamma(current * lambda, lambda);
  if (!std::isfinite(proposed) || proposed <= 0.0) return {current, false};
  const double log_r = mh_log_ratio(current, proposed, lambda, log_target);
  if (log_r >= 0.0 || std::log(rng.uniform()) < log_r) return {proposed, true};
  return {current, false};
}

bool mh_update_nu(ParameterState& s, NuKind which, double lambda, const PriorConfig& priors,
                  const InadequacyConfig& cfg, Rng& rng) {
  if (which == NuKind::kHist) {
    auto target = [&](double v) { return nu_h_log_target(s, v, priors, cfg); };
    const MhStep step = mh_gamma_step(s.nu_h, lambda, target, rng);
    s.nu_h = step.value;
    return step.accepted;
  }
  auto target = [&](double v) { return nu_f_log_target(s, v, priors); };
  const MhStep step = mh_gamma_step(s.nu_f, lambda, target, rng);
  s.nu_f = step.value;
  return step.accepted;
}

SweepResult gibbs_sweep(ParameterState& s, const EnsembleData& data, const ReanalysisData& rean,
                        const PriorConfig& priors, const InadequacyConfig& cfg, double lambda_h,
                        double lambda_f, Rng& rng) {
  update_system_block(s, cfg, rng);
  update_reanalysis_block(s, rean, priors, cfg, rng);
  update_model_block(s, data, rng);
  update_ensemble_block(s, data, priors, cfg, rng);
  SweepResult result{};
  result.accepted_nu_h = mh_update_nu(s, NuKind::kHist, lambda_h, priors, cfg, rng);
  result.accepted_nu_f = mh_update_nu(s, NuKind::kFut, lambda_f, priors, cfg, rng);
  return result;
}

PredictiveDraw sample_predictive(const ParameterState& s, const InadequacyConfig& cfg, Rng& rng) {
  const DerivedPrecisions d = derived(s, cfg);
  PredictiveDraw out;
  out.phi_a = rng.gamma(0.5 * d.nu_fa, 0.5 * d.nu_fa * s.theta2);
  out.y_f = rng.normal_prec(s.mu_f + s.beta * (s.y_h - s.mu_h), d.tau_delta_f);
  out.y_fa = rng.normal_prec(out.y_f, out.phi_a * s.tau_a);
  return out;
}

Chain::Chain(const EnsembleData& data, const ReanalysisData& rean, const PriorConfig& priors,
             const InadequacyConfig& inad, const ChainConfig& cfg, std::size_t chain_index)
    : data_(&data),
      rean_(&rean),
      priors_(priors),
      inad_(inad),
      cfg_(cfg),
      rng_(cfg.base_seed, chain_index, /*substream=*/1),
      state_(init_chain_state(data, rean, priors, inad, cfg.base_seed, chain_index)),
      window_len_(cfg.iters_initial - cfg.burn_in),
      lambda_h_(cfg.lambda_h),
      lambda_f_(cfg.lambda_f) {
  ring_.resize(window_len_, state_);
}

void Chain::advance(std::size_t n_iters) {
  for (std::size_t k = 0; k < n_iters; ++k) {
    const SweepResult r =
        gibbs_sweep(state_, *data_, *rean_, priors_, inad_, lambda_h_, lambda_f_, rng_);
    if (iter_ < cfg_.burn_in) {
      if (cfg_.adapt_lambda) {
        // Robbins-Monro drift toward the target rate; frozen after burn-in so
        // the post-burn-in kernel is fixed.
        const double gain = 1.0 / std::pow(static_cast<double>(iter_ + 1), 0.6);
        const double ah = r.accepted_nu_h ? 1.0 : 0.0;
        const double af = r.accepted_nu_f ? 1.0 : 0.0;
        lambda_h_ = std::clamp(lambda_h_ * std::exp(gain * (kTargetAcceptance - ah)), 1e-4, 1e6);
        lambda_f_ = std::clamp(lambda_f_ * std::exp(gain * (kTargetAcceptance - af)), 1e-4, 1e6);
      }
    } else {
      mh_h_.attempts += 1;
      mh_f_.attempts += 1;
      if (r.accepted_nu_h) mh_h_.accepted += 1;
      if (r.accepted_nu_f) mh_f_.accepted += 1;
      ring_[(iter_ - cfg_.burn_in) % window_len_] = state_;
    }
    ++iter_;
  }
}

std::vector<const ParameterState*> Chain::window() const {
  std::vector<const ParameterState*> out;
  out.reserve(window_len_);
  for (std::size_t t = iter_ - window_len_; t < iter_; ++t) {
    out.push_back(&ring_[(t - cfg_.burn_in) % window_len_]);
  }
  return out;
}

std::vector<ParameterState> Chain::thinned() const {
  const auto win = window();
  std::vector<ParameterState> out;
  out.reserve(window_len_ / cfg_.thin);
  for (std::size_t i = cfg_.thin - 1; i < win.size(); i += cfg_.thin) {
    out.push_back(*win[i]);
  }
  return out;
}

ChainOutput run_chain(const EnsembleData& data, const ReanalysisData& rean,
                      const PriorConfig& priors, const InadequacyConfig& inad,
                      const ChainConfig& cfg, std::size_t chain_index) {
  Chain chain(data, rean, priors, inad, cfg, chain_index);
  chain.advance(cfg.iters_initial);
  ChainOutput out;
  out.kept = chain.thinned();
  out.predictive.reserve(out.kept.size());
  for (const ParameterState& s : out.kept) {
    out.predictive.push_back(sample_predictive(s, inad, chain.rng()));
  }
  out.retained = chain.window_len();
  out.total_iters = chain.total_iters();
  out.mh_nu_h = chain.mh_nu_h();
  out.mh_nu_f = chain.mh_nu_f();
  return out;
}

const std::vector<Monitor>& monitored_quantities() {
  static const std::vector<Monitor> monitors = {
      {"mu_H", [](const ParameterState& s) { return s.mu_h; }},
      {"mu_F", [](const ParameterState& s) { return s.mu_f; }},
      {"beta", [](const ParameterState& s) { return s.beta; }},
      {"tau_H", [](const ParameterState& s) { return s.tau_h; }},
      {"tau_F_given_H", [](const ParameterState& s) { return s.tau_f_given_h; }},
      {"psi2", [](const ParameterState& s) { return s.psi2; }},
      {"theta2", [](const ParameterState& s) { return s.theta2; }},
      {"nu_H", [](const ParameterState& s) { return s.nu_h; }},
      {"nu_F", [](const ParameterState& s) { return s.nu_f; }},
      {"Y_H", [](const ParameterState& s) { return s.y_h; }},
      {"Y_Ha", [](const ParameterState& s) { return s.y_ha; }},
      {"tau_a", [](const ParameterState& s) { return s.tau_a; }},
      {"mu_W", [](const ParameterState& s) { return s.mu_w; }},
      {"tau_W", [](const ParameterState& s) { return s.tau_w; }},
  };
  return monitors;
}

PosteriorSample run_until_converged(const EnsembleData& data, const ReanalysisData& rean,
                                    const PriorConfig& priors, const InadequacyConfig& inad,
                                    const ChainConfig& cfg) {
  for (const auto& violations : {priors.violations(), inad.violations(), cfg.violations()}) {
    if (!violations.empty()) {
      throw std::invalid_argument("invalid configuration: " + violations.front());
    }
  }

  std::vector<Chain> chains;
  chains.reserve(cfg.n_chains);
  for (std::size_t c = 0; c < cfg.n_chains; ++c) {
    chains.emplace_back(data, rean, priors, inad, cfg, c);
  }
  for (auto& chain : chains) chain.advance(cfg.iters_initial);

  PosteriorSample sample;
  sample.n_chains = cfg.n_chains;

  const auto& monitors = monitored_quantities();
  auto gate = [&]() {
    bool all_ok = true;
    for (const Monitor& mon : monitors) {
      std::vector<std::vector<double>> series(chains.size());
      for (std::size_t c = 0; c < chains.size(); ++c) {
        const auto win = chains[c].window();
        series[c].reserve(win.size());
        for (const ParameterState* s : win) series[c].push_back(mon.extract(*s));
      }
      const double r = cfg.n_chains >= 2 ? diagnostics::psrf(series) : 1.0;
      sample.psrf[mon.name] = r;
      if (!(r <= cfg.psrf_threshold)) all_ok = false;
    }
    return all_ok;
  };

  bool converged = gate();
  while (!converged && chains.front().total_iters() + cfg.extend_by <= cfg.max_total_iters) {
    for (auto& chain : chains) chain.advance(cfg.extend_by);
    converged = gate();
  }
  sample.converged = converged;
  sample.total_iters_per_chain = chains.front().total_iters();

  for (auto& chain : chains) {
    const auto kept = chain.thinned();
    sample.kept_per_chain = kept.size();
    for (const ParameterState& s : kept) {
      sample.states.push_back(s);
      sample.predictive.push_back(sample_predictive(s, inad, chain.rng()));
    }
    sample.mh_nu_h.accepted += chain.mh_nu_h().accepted;
    sample.mh_nu_h.attempts += chain.mh_nu_h().attempts;
    sample.mh_nu_f.accepted += chain.mh_nu_f().accepted;
    sample.mh_nu_f.attempts += chain.mh_nu_f().attempts;
  }
  return sample;
}

}  // namespace coex::gibbs
