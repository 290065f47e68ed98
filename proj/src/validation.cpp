#include "coex/validation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "coex/diagnostics.hpp"
#include "coex/log_joint.hpp"
#include "coex/mathutil.hpp"

namespace coex::validation {

namespace {

std::vector<std::string> default_model_ids(std::size_t count) {
  std::vector<std::string> ids;
  ids.reserve(count);
  for (std::size_t m = 0; m < count; ++m) {
    std::string n = std::to_string(m + 1);
    if (n.size() < 2) n.insert(n.begin(), '0');
    ids.push_back("m" + n);
  }
  return ids;
}

}  // namespace

Design Design::reference() {
  Design d;
  d.hist_runs = {3, 5, 3, 8, 5, 1, 6, 4, 1, 3, 5, 3, 3};
  d.fut_runs = {1, 5, 3, 9, 1, 1, 6, 4, 1, 1, 3, 3, 1};
  d.n_reanalysis = 4;
  return d;
}

Design Design::uniform(std::size_t models, std::size_t runs_hist, std::size_t runs_fut,
                       std::size_t n_reanalysis) {
  Design d;
  d.hist_runs.assign(models, runs_hist);
  d.fut_runs.assign(models, runs_fut);
  d.n_reanalysis = n_reanalysis;
  return d;
}

EnsembleData draw_runs(const ParameterState& s, const Design& design,
                       const std::vector<std::string>& model_ids, Rng& rng) {
  EnsembleData data;
  data.models.resize(design.model_count());
  for (std::size_t m = 0; m < design.model_count(); ++m) {
    ModelRuns& runs = data.models[m];
    runs.model_id = model_ids[m];
    runs.hist_runs.reserve(design.hist_runs[m]);
    runs.fut_runs.reserve(design.fut_runs[m]);
    for (std::size_t r = 0; r < design.hist_runs[m]; ++r) {
      runs.hist_runs.push_back(rng.normal_prec(s.x_hm[m], s.tau_m[m]));
    }
    const double tau_fut = s.phi_m[m] * s.tau_m[m];
    for (std::size_t r = 0; r < design.fut_runs[m]; ++r) {
      runs.fut_runs.push_back(rng.normal_prec(s.x_fm[m], tau_fut));
    }
  }
  return data;
}

ReanalysisData draw_reanalysis(const ParameterState& s, std::size_t n, Rng& rng) {
  ReanalysisData rean;
  rean.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    rean.values.push_back(rng.normal_prec(s.mu_w, s.tau_w));
  }
  return rean;
}

SyntheticDataset generate_synthetic(const SyntheticTruth& truth, std::uint64_t seed) {
  const std::size_t mm = truth.design.model_count();
  Rng rng(seed, /*stream=*/0, /*substream=*/2);

  ParameterState s = ParameterState::sized(mm);
  s.mu_h = truth.mu_h;
  s.mu_f = truth.mu_f;
  s.beta = truth.beta;
  s.tau_h = truth.tau_h;
  s.tau_f_given_h = truth.tau_f_given_h;
  s.psi2 = truth.psi2;
  s.theta2 = truth.theta2;
  s.nu_h = truth.nu_h;
  s.nu_f = truth.nu_f;
  s.tau_w = truth.tau_w;

  for (std::size_t m = 0; m < mm; ++m) {
    s.tau_m[m] = rng.gamma(0.5 * truth.nu_h, 0.5 * truth.nu_h * truth.psi2);
    s.phi_m[m] = rng.gamma(0.5 * truth.nu_f, 0.5 * truth.nu_f * truth.theta2);
  }
  for (std::size_t m = 0; m < mm; ++m) {
    s.x_hm[m] = rng.normal_prec(truth.mu_h, truth.tau_h);
    s.x_fm[m] =
        rng.normal_prec(truth.mu_f + truth.beta * (s.x_hm[m] - truth.mu_h), truth.tau_f_given_h);
  }
  const DerivedPrecisions d = derived(s, truth.inad);
  s.y_h = rng.normal_prec(truth.mu_h, d.tau_delta_h);
  s.tau_a = rng.gamma(0.5 * d.nu_ha, 0.5 * d.nu_ha * truth.psi2);
  s.y_ha = rng.normal_prec(s.y_h, s.tau_a);
  s.mu_w = rng.normal_prec(s.y_ha, d.tau_delta_w);

  SyntheticDataset out;
  out.ensemble = draw_runs(s, truth.design, default_model_ids(mm), rng);
  out.reanalysis = draw_reanalysis(s, truth.design.n_reanalysis, rng);
  out.latents.x_hm = s.x_hm;
  out.latents.x_fm = s.x_fm;
  out.latents.tau_m = s.tau_m;
  out.latents.phi_m = s.phi_m;
  out.latents.y_h = s.y_h;
  out.latents.y_ha = s.y_ha;
  out.latents.tau_a = s.tau_a;
  out.latents.mu_w = s.mu_w;
  return out;
}

double pit_midpoint(std::span<const double> predictive, double observed) {
  std::size_t below = 0;
  std::size_t equal = 0;
  for (double v : predictive) {
    if (v < observed) {
      ++below;
    } else if (v == observed) {
      ++equal;
    }
  }
  const double s = static_cast<double>(predictive.size());
  return (static_cast<double>(below) + 0.5 * static_cast<double>(equal) + 0.5) / (s + 1.0);
}

std::vector<std::pair<std::string, double>> loo_cv_pit(const EnsembleData& data,
                                                       const ReanalysisData& rean,
                                                       const PriorConfig& priors,
                                                       const InadequacyConfig& inad,
                                                       const ChainConfig& cfg, CvMode mode) {
  const std::size_t mm = data.model_count();
  if (mm < 3) throw std::invalid_argument("loo_cv_pit: need at least 3 models");

  std::vector<std::pair<std::string, double>> pits;
  pits.reserve(mm);
  for (std::size_t held = 0; held < mm; ++held) {
    EnsembleData reduced = data;
    if (mode == CvMode::kAllData) {
      reduced.models.erase(reduced.models.begin() + static_cast<std::ptrdiff_t>(held));
    } else {
      reduced.models[held].fut_runs.clear();
    }

    ChainConfig refit_cfg = cfg;
    refit_cfg.base_seed = mix_seed(cfg.base_seed, 0xCAFE0000ULL + held);
    const gibbs::PosteriorSample fit =
        gibbs::run_until_converged(reduced, rean, priors, inad, refit_cfg);
    if (!fit.converged) {
      throw ConvergenceFailure("leave-one-out refit without model " +
                               data.models[held].model_id + " did not converge");
    }

    Rng rng(refit_cfg.base_seed, 0x70AD, held);
    std::vector<double> responses;
    responses.reserve(fit.states.size());
    for (const ParameterState& s : fit.states) {
      double x_h;
      if (mode == CvMode::kAllData) {
        x_h = rng.normal_prec(s.mu_h, s.tau_h);
      } else {
        x_h = s.x_hm[held];
      }
      const double x_f =
          rng.normal_prec(s.mu_f + s.beta * (x_h - s.mu_h), s.tau_f_given_h);
      responses.push_back(x_f - x_h);
    }

    const ModelRuns& held_runs = data.models[held];
    double mean_h = 0.0, mean_f = 0.0;
    for (double x : held_runs.hist_runs) mean_h += x;
    mean_h /= static_cast<double>(held_runs.hist_runs.size());
    for (double x : held_runs.fut_runs) mean_f += x;
    mean_f /= static_cast<double>(held_runs.fut_runs.size());

    pits.emplace_back(held_runs.model_id, pit_midpoint(responses, mean_f - mean_h));
  }
  return pits;
}

namespace {

// P(D_n < d) for the one-sample Kolmogorov-Smirnov statistic, evaluated with
// the Marsaglia-Tsang-Wang matrix method (exact up to scaling), valid at the
// small sample sizes this tool meets.
double ks_cdf_exact(std::size_t n, double d) {
  if (d <= 0.0) return 0.0;
  if (d >= 1.0) return 1.0;
  const double nd = static_cast<double>(n) * d;
  const int k = static_cast<int>(std::ceil(nd));
  const int m = 2 * k - 1;
  const double h = static_cast<double>(k) - nd;

  std::vector<double> big_h(static_cast<std::size_t>(m) * m, 0.0);
  auto at = [&](int i, int j) -> double& { return big_h[static_cast<std::size_t>(i) * m + j]; };
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      at(i, j) = (i - j + 1 >= 0) ? 1.0 : 0.0;
    }
  }
  for (int i = 0; i < m; ++i) {
    at(i, 0) -= std::pow(h, i + 1);
    at(m - 1, i) -= std::pow(h, m - i);
  }
  at(m - 1, 0) += (2.0 * h - 1.0 > 0.0) ? std::pow(2.0 * h - 1.0, m) : 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i - j + 1 > 0) {
        for (int g = 1; g <= i - j + 1; ++g) at(i, j) /= static_cast<double>(g);
      }
    }
  }

  // Q = H^n with decimal-exponent rescaling to dodge overflow.
  std::vector<double> q = big_h;
  std::vector<double> tmp(big_h.size());
  int exponent = 0;
  auto mat_mul = [&](const std::vector<double>& a, const std::vector<double>& b,
                     std::vector<double>& out) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (int g = 0; g < m; ++g) {
          s += a[static_cast<std::size_t>(i) * m + g] * b[static_cast<std::size_t>(g) * m + j];
        }
        out[static_cast<std::size_t>(i) * m + j] = s;
      }
    }
  };
  auto rescale = [&](std::vector<double>& a, int& e) {
    if (a[static_cast<std::size_t>(k - 1) * m + (k - 1)] > 1e140) {
      for (double& x : a) x *= 1e-140;
      e += 140;
    }
  };

  std::size_t remaining = n;
  std::vector<double> power = big_h;
  int power_exp = 0;
  bool q_set = false;
  int q_exp = 0;
  while (remaining > 0) {
    if (remaining & 1) {
      if (!q_set) {
        q = power;
        q_exp = power_exp;
        q_set = true;
      } else {
        mat_mul(q, power, tmp);
        q.swap(tmp);
        q_exp += power_exp;
        rescale(q, q_exp);
      }
    }
    remaining >>= 1;
    if (remaining > 0) {
      mat_mul(power, power, tmp);
      power.swap(tmp);
      power_exp *= 2;
      rescale(power, power_exp);
    }
  }
  exponent = q_exp;

  double s = q[static_cast<std::size_t>(k - 1) * m + (k - 1)];
  for (std::size_t i = 1; i <= n; ++i) {
    s *= static_cast<double>(i) / static_cast<double>(n);
    if (s < 1e-140) {
      s *= 1e140;
      exponent -= 140;
    }
  }
  return s * std::pow(10.0, exponent);
}

}  // namespace

double ks_uniform_pvalue(std::span<const double> pits) {
  if (pits.size() < 3) throw std::invalid_argument("ks_uniform_pvalue: need at least 3 values");
  std::vector<double> sorted(pits.begin(), pits.end());
  for (double u : sorted) {
    if (!(u >= 0.0 && u <= 1.0)) {
      throw std::invalid_argument("ks_uniform_pvalue: values must lie in [0,1]");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d_stat = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double lo = sorted[i] - static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n - sorted[i];
    d_stat = std::max({d_stat, lo, hi});
  }
  const double p = 1.0 - ks_cdf_exact(sorted.size(), d_stat);
  return std::clamp(p, 0.0, 1.0);
}

ERFit ensemble_regression(const EnsembleData& data) {
  if (data.model_count() < 2) {
    throw std::invalid_argument("ensemble_regression: need at least 2 models");
  }
  const std::size_t mm = data.model_count();
  std::vector<double> mean_h(mm), resp(mm);
  for (std::size_t m = 0; m < mm; ++m) {
    const ModelRuns& runs = data.models[m];
    if (runs.hist_runs.empty() || runs.fut_runs.empty()) {
      throw std::invalid_argument("ensemble_regression: model " + runs.model_id +
                                  " has no runs in one scenario");
    }
    double h = 0.0, f = 0.0;
    for (double x : runs.hist_runs) h += x;
    for (double x : runs.fut_runs) f += x;
    mean_h[m] = h / static_cast<double>(runs.hist_runs.size());
    resp[m] = f / static_cast<double>(runs.fut_runs.size()) - mean_h[m];
  }
  double grand_h = 0.0, grand_r = 0.0;
  for (std::size_t m = 0; m < mm; ++m) {
    grand_h += mean_h[m];
    grand_r += resp[m];
  }
  grand_h /= static_cast<double>(mm);
  grand_r /= static_cast<double>(mm);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t m = 0; m < mm; ++m) {
    const double dx = mean_h[m] - grand_h;
    sxx += dx * dx;
    sxy += dx * (resp[m] - grand_r);
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("ensemble_regression: degenerate regressor variance");
  }
  ERFit fit;
  fit.beta_prime_hat = sxy / sxx;
  fit.mean_response = grand_r;
  fit.mean_hist = grand_h;
  return fit;
}

double dilution_expectation(double beta_prime, double sigma_h2, double sigma2, double runs) {
  if (!(sigma_h2 > 0.0)) throw std::invalid_argument("dilution_expectation: sigma_h2 > 0 required");
  if (sigma2 < 0.0) throw std::invalid_argument("dilution_expectation: sigma2 >= 0 required");
  if (!(runs >= 1.0)) throw std::invalid_argument("dilution_expectation: runs >= 1 required");
  const double noise = sigma2 / runs;
  return (beta_prime * sigma_h2 - noise) / (sigma_h2 + noise);
}

double coexchangeable_shrinkage(double beta, double kappa, double sigma_h2, double d_h2) {
  if (!(sigma_h2 > 0.0) || d_h2 < 0.0 || !(kappa > 0.0)) {
    throw std::invalid_argument("coexchangeable_shrinkage: invalid arguments");
  }
  const double k2s = kappa * kappa * sigma_h2;
  return k2s / (k2s + d_h2) * beta;
}

// ---------------------------------------------------------------------------
// Conditional-vs-joint grid oracle.

namespace {

struct SliceEnv {
  EnsembleData data;
  ReanalysisData rean;
  PriorConfig priors;
  InadequacyConfig inad;
  std::size_t m_focus = 0;
};

struct Slice {
  std::string name;
  bool is_gamma;
  std::function<void(ParameterState&, double)> set;
  std::function<gibbs::NormalCond(const ParameterState&, const SliceEnv&)> normal_cond;
  std::function<gibbs::GammaCond(const ParameterState&, const SliceEnv&)> gamma_cond;
};

std::vector<Slice> all_slices() {
  using gibbs::GammaCond;
  using gibbs::NormalCond;
  std::vector<Slice> slices;
  auto add_normal = [&](const std::string& name, auto set,
                        std::function<NormalCond(const ParameterState&, const SliceEnv&)> cond) {
    slices.push_back({name, false, set, std::move(cond), nullptr});
  };
  auto add_gamma = [&](const std::string& name, auto set,
                       std::function<GammaCond(const ParameterState&, const SliceEnv&)> cond) {
    slices.push_back({name, true, set, nullptr, std::move(cond)});
  };

  add_normal("Y_Ha", [](ParameterState& s, double v) { s.y_ha = v; },
             [](const ParameterState& s, const SliceEnv& e) {
               return gibbs::y_ha_conditional(s, e.inad);
             });
  add_normal("Y_H", [](ParameterState& s, double v) { s.y_h = v; },
             [](const ParameterState& s, const SliceEnv& e) {
               return gibbs::y_h_conditional(s, e.inad);
             });
  add_gamma("tau_a", [](ParameterState& s, double v) { s.tau_a = v; },
            [](const ParameterState& s, const SliceEnv& e) {
              return gibbs::tau_a_conditional(s, e.inad);
            });
  add_normal("mu_W", [](ParameterState& s, double v) { s.mu_w = v; },
             [](const ParameterState& s, const SliceEnv& e) {
               return gibbs::mu_w_conditional(s, e.rean, e.inad);
             });
  add_gamma("tau_W", [](ParameterState& s, double v) { s.tau_w = v; },
            [](const ParameterState& s, const SliceEnv& e) {
              return gibbs::tau_w_conditional(s, e.rean, e.priors, e.inad);
            });
  add_normal("X_Fm", [](ParameterState& s, double v) { s.x_fm[0] = v; },
             [](const ParameterState& s, const SliceEnv& e) {
               return gibbs::x_fm_conditional(s, e.data, 0);
             });
  add_normal("X_Hm", [](ParameterState& s, double v) { s.x_hm[0] = v; },
             [](const ParameterState& s, const SliceEnv& e) {
               return gibbs::x_hm_conditional(s, e.data, 0);
             });
  add_gamma("tau_m", [](ParameterState& s, double v) { s.tau_m[0] = v; },
            [](const ParameterState& s, const SliceEnv& e) {
              return gibbs::tau_m_conditional(s, e.data, 0);
            });
  add_gamma("phi_m", [](ParameterState& s, double v) { s.phi_m[0] = v; },
            [](const ParameterState& s, const SliceEnv& e) {
              return gibbs::phi_m_conditional(s, e.data, 0);
            });
  add_normal("mu_H", [](ParameterState& s, double v) { s.mu_h = v; },
             [](const ParameterState& s, const SliceEnv& e) {
               return gibbs::mu_h_conditional(s, e.priors, e.inad);
             });
  add_normal("mu_F", [](ParameterState& s, double v) { s.mu_f = v; },
             [](const ParameterState& s, const SliceEnv& e) {
               return gibbs::mu_f_conditional(s, e.priors);
             });
  add_normal("beta", [](ParameterState& s, double v) { s.beta = v; },
             [](const ParameterState& s, const SliceEnv& e) {
               return gibbs::beta_conditional(s, e.priors);
             });
  add_gamma("tau_H", [](ParameterState& s, double v) { s.tau_h = v; },
            [](const ParameterState& s, const SliceEnv& e) {
              return gibbs::tau_h_conditional(s, e.priors, e.inad);
            });
  add_gamma("tau_F_given_H", [](ParameterState& s, double v) { s.tau_f_given_h = v; },
            [](const ParameterState& s, const SliceEnv& e) {
              return gibbs::tau_f_conditional(s, e.priors);
            });
  add_gamma("psi2", [](ParameterState& s, double v) { s.psi2 = v; },
            [](const ParameterState& s, const SliceEnv& e) {
              return gibbs::psi2_conditional(s, e.priors, e.inad);
            });
  add_gamma("theta2", [](ParameterState& s, double v) { s.theta2 = v; },
            [](const ParameterState& s, const SliceEnv& e) {
              return gibbs::theta2_conditional(s, e.priors, e.inad);
            });
  return slices;
}

double log_sum_exp(const std::vector<double>& v) {
  double mx = v.front();
  for (double x : v) mx = std::max(mx, x);
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

SliceEnv random_env(std::uint64_t seed, int trial) {
  Rng rng(seed, static_cast<std::uint64_t>(trial), 3);
  SliceEnv env;

  const std::size_t mm = 2 + (static_cast<std::size_t>(trial) % 4);
  Design design;
  for (std::size_t m = 0; m < mm; ++m) {
    design.hist_runs.push_back(1 + (rng.next_u64() % 4));
    design.fut_runs.push_back(1 + (rng.next_u64() % 4));
  }
  design.n_reanalysis = 1 + (rng.next_u64() % 5);

  SyntheticTruth truth;
  truth.mu_h = rng.normal(0.0, 2.0);
  truth.mu_f = truth.mu_h + rng.normal(1.0, 2.0);
  truth.beta = rng.normal(1.0, 0.5);
  truth.tau_h = 0.2 + rng.gamma(3.0, 2.0);
  truth.tau_f_given_h = 0.2 + rng.gamma(3.0, 2.0);
  truth.psi2 = 0.2 + rng.gamma(3.0, 2.0);
  truth.theta2 = 0.2 + rng.gamma(3.0, 2.0);
  truth.nu_h = 2.0 + 10.0 * rng.uniform();
  truth.nu_f = 2.0 + 10.0 * rng.uniform();
  truth.tau_w = 0.2 + rng.gamma(3.0, 2.0);
  truth.inad.kappa = 1.0 + rng.uniform();
  truth.inad.kappa_w = 1.0 + rng.uniform();
  truth.design = design;

  const SyntheticDataset ds = generate_synthetic(truth, rng.next_u64());
  env.data = ds.ensemble;
  env.rean = ds.reanalysis;
  env.inad = truth.inad;
  env.m_focus = 0;

  env.priors.a_mu_h = rng.normal(0.0, 1.0);
  env.priors.b_mu_h = 0.05 + rng.uniform();
  env.priors.b_mu_f = 0.05 + rng.uniform();
  env.priors.a_beta = rng.normal(1.0, 0.5);
  env.priors.b_beta = 0.05 + rng.uniform();
  env.priors.a_tau_h = 0.5 + 2.0 * rng.uniform();
  env.priors.b_tau_h = 0.2 + rng.uniform();
  env.priors.a_tau_f = 0.5 + 2.0 * rng.uniform();
  env.priors.b_tau_f = 0.2 + rng.uniform();
  env.priors.a_psi2 = 0.5 + 2.0 * rng.uniform();
  env.priors.b_psi2 = 0.2 + rng.uniform();
  env.priors.a_theta2 = 0.5 + 2.0 * rng.uniform();
  env.priors.b_theta2 = 0.2 + rng.uniform();
  env.priors.a_nu_h = 0.5 + 2.0 * rng.uniform();
  env.priors.b_nu_h = 0.05 + 0.4 * rng.uniform();
  env.priors.a_nu_f = 0.5 + 2.0 * rng.uniform();
  env.priors.b_nu_f = 0.05 + 0.4 * rng.uniform();
  env.priors.a_tau_w = 0.5 + 2.0 * rng.uniform();
  env.priors.b_tau_w = 0.2 + rng.uniform();
  return env;
}

ParameterState random_state(const SliceEnv& env, std::uint64_t seed, int trial) {
  Rng rng(seed, static_cast<std::uint64_t>(trial), 4);
  const std::size_t mm = env.data.model_count();
  ParameterState s = ParameterState::sized(mm);
  s.mu_h = rng.normal(0.0, 2.0);
  s.mu_f = rng.normal(1.0, 2.0);
  s.beta = rng.normal(1.0, 0.7);
  s.tau_h = 0.2 + rng.gamma(3.0, 1.5);
  s.tau_f_given_h = 0.2 + rng.gamma(3.0, 1.5);
  s.psi2 = 0.2 + rng.gamma(3.0, 1.5);
  s.theta2 = 0.2 + rng.gamma(3.0, 1.5);
  s.nu_h = 2.0 + 10.0 * rng.uniform();
  s.nu_f = 2.0 + 10.0 * rng.uniform();
  for (std::size_t m = 0; m < mm; ++m) {
    s.x_hm[m] = rng.normal(s.mu_h, 1.5);
    s.x_fm[m] = rng.normal(s.mu_f, 1.5);
    s.tau_m[m] = 0.2 + rng.gamma(3.0, 1.5);
    s.phi_m[m] = 0.2 + rng.gamma(3.0, 1.5);
  }
  s.y_h = rng.normal(s.mu_h, 1.5);
  s.y_ha = rng.normal(s.y_h, 1.0);
  s.tau_a = 0.2 + rng.gamma(3.0, 1.5);
  s.mu_w = rng.normal(s.y_ha, 1.0);
  s.tau_w = 0.2 + rng.gamma(3.0, 1.5);
  return s;
}

}  // namespace

std::vector<GridCheckResult> conditional_grid_check(std::uint64_t seed, int n_states, int n_grid) {
  const std::vector<Slice> slices = all_slices();
  std::vector<GridCheckResult> results;
  results.reserve(slices.size());
  for (const Slice& slice : slices) results.push_back({slice.name, 0.0});

  for (int trial = 0; trial < n_states; ++trial) {
    const SliceEnv env = random_env(seed, trial);
    const ParameterState base = random_state(env, seed, trial);

    for (std::size_t si = 0; si < slices.size(); ++si) {
      const Slice& slice = slices[si];

      std::vector<double> grid(static_cast<std::size_t>(n_grid));
      std::vector<double> closed(static_cast<std::size_t>(n_grid));
      if (slice.is_gamma) {
        const gibbs::GammaCond cond = slice.gamma_cond(base, env);
        const double lo = gamma_quantile(1e-6, cond.shape, cond.rate);
        const double hi = gamma_quantile(0.999999, cond.shape, cond.rate);
        for (int i = 0; i < n_grid; ++i) {
          const double x = lo + (hi - lo) * static_cast<double>(i) / (n_grid - 1);
          grid[static_cast<std::size_t>(i)] = x;
          closed[static_cast<std::size_t>(i)] = gamma_lpdf(x, cond.shape, cond.rate);
        }
      } else {
        const gibbs::NormalCond cond = slice.normal_cond(base, env);
        const double sd = 1.0 / std::sqrt(cond.precision);
        for (int i = 0; i < n_grid; ++i) {
          const double x = cond.mean + sd * (-6.0 + 12.0 * static_cast<double>(i) / (n_grid - 1));
          grid[static_cast<std::size_t>(i)] = x;
          closed[static_cast<std::size_t>(i)] = normal_lpdf(x, cond.mean, cond.precision);
        }
      }

      std::vector<double> joint(static_cast<std::size_t>(n_grid));
      ParameterState probe = base;
      for (int i = 0; i < n_grid; ++i) {
        slice.set(probe, grid[static_cast<std::size_t>(i)]);
        joint[static_cast<std::size_t>(i)] =
            log_joint(probe, env.data, env.rean, env.priors, env.inad);
      }

      const double lse_joint = log_sum_exp(joint);
      const double lse_closed = log_sum_exp(closed);
      for (int i = 0; i < n_grid; ++i) {
        const double p = std::exp(joint[static_cast<std::size_t>(i)] - lse_joint);
        const double q = std::exp(closed[static_cast<std::size_t>(i)] - lse_closed);
        const double rel = std::abs(p - q) / q;
        results[si].max_rel_err = std::max(results[si].max_rel_err, rel);
      }
    }
  }
  return results;
}

// ---------------------------------------------------------------------------
// Joint-distribution simulator test.

namespace {

ParameterState draw_state_from_prior(const PriorConfig& pr, const InadequacyConfig& inad,
                                     std::size_t mm, Rng& rng) {
  ParameterState s = ParameterState::sized(mm);
  s.mu_h = rng.normal_prec(pr.a_mu_h, pr.b_mu_h);
  s.mu_f = rng.normal_prec(s.mu_h, pr.b_mu_f);
  s.beta = rng.normal_prec(pr.a_beta, pr.b_beta);
  s.tau_h = rng.gamma(pr.a_tau_h, pr.b_tau_h);
  s.tau_f_given_h = rng.gamma(pr.a_tau_f, pr.b_tau_f);
  s.psi2 = rng.gamma(pr.a_psi2, pr.b_psi2);
  s.theta2 = rng.gamma(pr.a_theta2, pr.b_theta2);
  s.nu_h = rng.gamma(pr.a_nu_h, pr.b_nu_h);
  s.nu_f = rng.gamma(pr.a_nu_f, pr.b_nu_f);
  for (std::size_t m = 0; m < mm; ++m) {
    s.tau_m[m] = rng.gamma(0.5 * s.nu_h, 0.5 * s.nu_h * s.psi2);
    s.phi_m[m] = rng.gamma(0.5 * s.nu_f, 0.5 * s.nu_f * s.theta2);
    s.x_hm[m] = rng.normal_prec(s.mu_h, s.tau_h);
    s.x_fm[m] = rng.normal_prec(s.mu_f + s.beta * (s.x_hm[m] - s.mu_h), s.tau_f_given_h);
  }
  s.tau_w = rng.gamma(pr.a_tau_w, pr.b_tau_w);
  const DerivedPrecisions d = derived(s, inad);
  s.y_h = rng.normal_prec(s.mu_h, d.tau_delta_h);
  s.tau_a = rng.gamma(0.5 * d.nu_ha, 0.5 * d.nu_ha * s.psi2);
  s.y_ha = rng.normal_prec(s.y_h, s.tau_a);
  s.mu_w = rng.normal_prec(s.y_ha, d.tau_delta_w);
  return s;
}

struct TestFunction {
  std::string name;
  std::function<double(const ParameterState&, const InadequacyConfig&)> eval;
};

std::vector<TestFunction> geweke_functions() {
  auto plain = [](double (*get)(const ParameterState&)) {
    return [get](const ParameterState& s, const InadequacyConfig&) { return get(s); };
  };
  std::vector<TestFunction> fs;
  fs.push_back({"mu_H", plain([](const ParameterState& s) { return s.mu_h; })});
  fs.push_back({"mu_F_minus_mu_H", plain([](const ParameterState& s) { return s.mu_f - s.mu_h; })});
  fs.push_back({"beta", plain([](const ParameterState& s) { return s.beta; })});
  fs.push_back({"log_tau_H", plain([](const ParameterState& s) { return std::log(s.tau_h); })});
  fs.push_back(
      {"log_tau_F_given_H", plain([](const ParameterState& s) { return std::log(s.tau_f_given_h); })});
  fs.push_back({"log_psi2", plain([](const ParameterState& s) { return std::log(s.psi2); })});
  fs.push_back({"log_theta2", plain([](const ParameterState& s) { return std::log(s.theta2); })});
  fs.push_back({"log_nu_H", plain([](const ParameterState& s) { return std::log(s.nu_h); })});
  fs.push_back({"log_nu_F", plain([](const ParameterState& s) { return std::log(s.nu_f); })});
  fs.push_back({"log_tau_W", plain([](const ParameterState& s) { return std::log(s.tau_w); })});
  fs.push_back({"z_Y_H", [](const ParameterState& s, const InadequacyConfig& inad) {
                  return (s.y_h - s.mu_h) * std::sqrt(derived(s, inad).tau_delta_h);
                }});
  fs.push_back({"z_Y_Ha", [](const ParameterState& s, const InadequacyConfig&) {
                  return (s.y_ha - s.y_h) * std::sqrt(s.tau_a);
                }});
  fs.push_back({"z_mu_W", [](const ParameterState& s, const InadequacyConfig& inad) {
                  return (s.mu_w - s.y_ha) * std::sqrt(derived(s, inad).tau_delta_w);
                }});
  fs.push_back({"z_X_H1", [](const ParameterState& s, const InadequacyConfig&) {
                  return (s.x_hm[0] - s.mu_h) * std::sqrt(s.tau_h);
                }});
  fs.push_back({"z_X_F1", [](const ParameterState& s, const InadequacyConfig&) {
                  return (s.x_fm[0] - s.mu_f - s.beta * (s.x_hm[0] - s.mu_h)) *
                         std::sqrt(s.tau_f_given_h);
                }});
  fs.push_back({"log_tau1_nu_psi2", [](const ParameterState& s, const InadequacyConfig&) {
                  return std::log(s.tau_m[0] * s.nu_h * s.psi2);
                }});
  fs.push_back({"log_phi1_nu_theta2", [](const ParameterState& s, const InadequacyConfig&) {
                  return std::log(s.phi_m[0] * s.nu_f * s.theta2);
                }});
  fs.push_back({"log_tau_a_nu_psi2", [](const ParameterState& s, const InadequacyConfig& inad) {
                  return std::log(s.tau_a * derived(s, inad).nu_ha * s.psi2);
                }});
  return fs;
}

}  // namespace

GewekeResult geweke_joint_test(std::size_t n_draws, std::uint64_t seed) {
  const Design design = Design::uniform(3, 2, 2, 2);
  const std::vector<std::string> ids = default_model_ids(design.model_count());

  // Informative test priors keep every compared moment finite.
  PriorConfig pr;
  pr.a_mu_h = 0.0;
  pr.b_mu_h = 1.0;
  pr.b_mu_f = 1.0;
  pr.a_beta = 1.0;
  pr.b_beta = 1.0;
  pr.a_tau_h = pr.b_tau_h = 3.0;
  pr.a_tau_f = pr.b_tau_f = 3.0;
  pr.a_psi2 = pr.b_psi2 = 6.0;
  pr.a_theta2 = pr.b_theta2 = 6.0;
  pr.a_nu_h = 6.0;
  pr.b_nu_h = 1.0;
  pr.a_nu_f = 6.0;
  pr.b_nu_f = 1.0;
  pr.a_tau_w = pr.b_tau_w = 3.0;
  const InadequacyConfig inad{1.2, 1.2};
  const double lambda = 1.5;

  const std::vector<TestFunction> fs = geweke_functions();
  std::vector<std::vector<double>> mc(fs.size()), sc(fs.size());
  for (auto& v : mc) v.reserve(n_draws);
  for (auto& v : sc) v.reserve(n_draws);

  // Marginal-conditional: independent draws from the prior hierarchy. The
  // data layer never feeds back into the recorded functions, so it is not
  // generated here.
  Rng mc_rng(seed, 0, 10);
  for (std::size_t i = 0; i < n_draws; ++i) {
    const ParameterState s = draw_state_from_prior(pr, inad, design.model_count(), mc_rng);
    for (std::size_t f = 0; f < fs.size(); ++f) mc[f].push_back(fs[f].eval(s, inad));
  }

  // Successive-conditional: alternate a data redraw with one sweep.
  Rng sc_rng(seed, 1, 10);
  ParameterState state = draw_state_from_prior(pr, inad, design.model_count(), sc_rng);
  for (std::size_t i = 0; i < n_draws; ++i) {
    const EnsembleData data = draw_runs(state, design, ids, sc_rng);
    const ReanalysisData rean = draw_reanalysis(state, design.n_reanalysis, sc_rng);
    gibbs::gibbs_sweep(state, data, rean, pr, inad, lambda, lambda, sc_rng);
    for (std::size_t f = 0; f < fs.size(); ++f) sc[f].push_back(fs[f].eval(state, inad));
  }

  GewekeResult result;
  const double n = static_cast<double>(n_draws);
  for (std::size_t f = 0; f < fs.size(); ++f) {
    for (int moment = 1; moment <= 2; ++moment) {
      std::vector<double> a(mc[f]), b(sc[f]);
      if (moment == 2) {
        for (double& x : a) x *= x;
        for (double& x : b) x *= x;
      }
      double mean_a = 0.0, mean_b = 0.0;
      for (double x : a) mean_a += x;
      for (double x : b) mean_b += x;
      mean_a /= n;
      mean_b /= n;
      double var_a = 0.0;
      for (double x : a) var_a += (x - mean_a) * (x - mean_a);
      var_a /= (n - 1.0);
      const double se_a = std::sqrt(var_a / n);
      const double se_b = diagnostics::mcse_batch_means(b);
      const double z = (mean_a - mean_b) / std::sqrt(se_a * se_a + se_b * se_b);
      result.names.push_back(fs[f].name + (moment == 1 ? "" : "^2"));
      result.z.push_back(z);
    }
  }
  return result;
}

}  // namespace coex::validation
