// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Runs against the library exactly as the CLI does.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "coex/diagnostics.hpp"
#include "coex/gibbs.hpp"
#include "coex/mathutil.hpp"
#include "coex/rng.hpp"
#include "coex/runner.hpp"
#include "coex/validation.hpp"

using namespace coex;

namespace {

validation::SyntheticTruth reference_truth() {
  validation::SyntheticTruth truth;
  truth.design = validation::Design::reference();
  return truth;
}

ChainConfig reduced_budget(std::uint64_t seed) {
  ChainConfig cfg;
  cfg.iters_initial = 4000;
  cfg.burn_in = 2000;
  cfg.extend_by = 2000;
  cfg.thin = 8;
  cfg.max_total_iters = 40000;
  cfg.base_seed = seed;
  return cfg;
}

bool criterion_conditionals(std::string& detail) {
  const auto results = validation::conditional_grid_check(/*seed=*/2024, /*n_states=*/20);
  double worst = 0.0;
  std::string worst_name;
  for (const auto& r : results) {
    if (r.max_rel_err > worst) {
      worst = r.max_rel_err;
      worst_name = r.name;
    }
  }
  std::ostringstream os;
  os << results.size() << " conditionals, worst rel err " << worst << " (" << worst_name << ")";
  detail = os.str();
  return results.size() == 16 && worst < 1e-6;
}

bool criterion_mh(std::string& detail) {
  // Identity proposal: exactly zero log ratio.
  auto target = [](double x) { return gamma_lpdf(x, 3.0, 2.0); };
  for (double v : {0.2, 1.0, 4.0, 25.0}) {
    if (gibbs::mh_log_ratio(v, v, 2.0, target) != 0.0) {
      detail = "identity move log-ratio not exactly zero";
      return false;
    }
  }

  // Histogram of the chain against the stubbed target.
  Rng rng(7701);
  const std::size_t steps = 100000;
  const std::size_t thin = 25;
  double x = 1.0;
  std::vector<double> kept;
  kept.reserve(steps / thin);
  for (std::size_t i = 0; i < steps; ++i) {
    x = gibbs::mh_gamma_step(x, 2.0, target, rng).value;
    if ((i + 1) % thin == 0) kept.push_back(x);
  }
  const int bins = 20;
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (double v : kept) {
    int b = 0;
    while (b < bins - 1 && v > gamma_quantile((b + 1) / static_cast<double>(bins), 3.0, 2.0)) ++b;
    counts[static_cast<std::size_t>(b)] += 1.0;
  }
  const double expected = static_cast<double>(kept.size()) / bins;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  const double p = chi_square_sf(chi2, bins - 1);
  std::ostringstream os;
  os << "chi-square p = " << p << " over " << steps << " steps";
  detail = os.str();
  return p > 0.01;
}

bool criterion_geweke(std::string& detail) {
  const validation::GewekeResult r = validation::geweke_joint_test(10000, 9090);
  double worst = 0.0;
  std::string worst_name;
  for (std::size_t i = 0; i < r.z.size(); ++i) {
    if (std::abs(r.z[i]) > std::abs(worst)) {
      worst = r.z[i];
      worst_name = r.names[i];
    }
  }
  std::ostringstream os;
  os << r.z.size() << " moment comparisons, worst z = " << worst << " (" << worst_name << ")";
  detail = os.str();
  return std::abs(worst) <= 4.0;
}

bool criterion_dilution(std::string& detail) {
  const std::size_t reps = 10000;
  const std::size_t mm = 20;
  auto mc_mean_slope = [&](double beta_prime, std::uint64_t seed, double& se_out) {
    Rng rng(seed);
    std::vector<double> slopes;
    slopes.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      EnsembleData data;
      data.models.resize(mm);
      for (std::size_t m = 0; m < mm; ++m) {
        const double x_hm = rng.normal(0.0, 1.0);                    // sigma_H^2 = 1
        const double x_fm = 2.0 + (beta_prime + 1.0) * x_hm + rng.normal(0.0, 0.5);
        data.models[m].model_id = "m" + std::to_string(m);
        data.models[m].hist_runs = {x_hm + rng.normal(0.0, 1.0)};    // sigma^2 = 1, R = 1
        data.models[m].fut_runs = {x_fm + rng.normal(0.0, 1.0)};
      }
      slopes.push_back(validation::ensemble_regression(data).beta_prime_hat);
    }
    double mean = 0.0;
    for (double s : slopes) mean += s;
    mean /= static_cast<double>(reps);
    double var = 0.0;
    for (double s : slopes) var += (s - mean) * (s - mean);
    var /= static_cast<double>(reps - 1);
    se_out = std::sqrt(var / static_cast<double>(reps));
    return mean;
  };

  double se1 = 0.0, se2 = 0.0;
  const double mc1 = mc_mean_slope(0.5, 311, se1);
  const double an1 = validation::dilution_expectation(0.5, 1.0, 1.0, 1.0);
  const double mc2 = mc_mean_slope(0.0, 312, se2);
  const double an2 = validation::dilution_expectation(0.0, 1.0, 1.0, 1.0);

  std::ostringstream os;
  os << "beta'=0.5: mc " << mc1 << " vs " << an1 << " (se " << se1 << "); beta'=0: mc " << mc2
     << " vs " << an2 << " (se " << se2 << ")";
  detail = os.str();
  const bool ok1 = std::abs(mc1 - an1) < 3.0 * se1;
  const bool ok2 = std::abs(mc2 - an2) < 3.0 * se2 && std::abs(an2 - (-0.5)) < 1e-12;
  return ok1 && ok2;
}

bool criterion_recovery(std::string& detail) {
  const validation::SyntheticTruth truth = reference_truth();
  const PriorConfig priors = PriorConfig::defaults_for(truth.design.model_count());
  int cover_mu_h = 0, cover_mu_f = 0, cover_beta = 0, unconverged = 0;
  const int reps = 50;
  for (int r = 0; r < reps; ++r) {
    const auto ds = validation::generate_synthetic(truth, 40000 + static_cast<std::uint64_t>(r));
    const gibbs::PosteriorSample sample = gibbs::run_until_converged(
        ds.ensemble, ds.reanalysis, priors, truth.inad,
        reduced_budget(90000 + static_cast<std::uint64_t>(r)));
    if (!sample.converged) ++unconverged;

    auto covers = [&](double (*get)(const ParameterState&), double target) {
      std::vector<double> draws;
      draws.reserve(sample.states.size());
      for (const auto& s : sample.states) draws.push_back(get(s));
      const diagnostics::Summary sum = diagnostics::summarize(draws);
      return sum.q05 <= target && target <= sum.q95;
    };
    if (covers([](const ParameterState& s) { return s.mu_h; }, truth.mu_h)) ++cover_mu_h;
    if (covers([](const ParameterState& s) { return s.mu_f; }, truth.mu_f)) ++cover_mu_f;
    if (covers([](const ParameterState& s) { return s.beta; }, truth.beta)) ++cover_beta;
  }
  std::ostringstream os;
  os << "coverage mu_H " << cover_mu_h << "/50, mu_F " << cover_mu_f << "/50, beta " << cover_beta
     << "/50, unconverged " << unconverged;
  detail = os.str();
  auto in_band = [](int c) { return c >= 38 && c <= 50; };
  return in_band(cover_mu_h) && in_band(cover_mu_f) && in_band(cover_beta);
}

bool criterion_protocol(std::string& detail) {
  const ChainConfig defaults;
  if (defaults.n_chains != 4 || defaults.iters_initial != 20000 || defaults.burn_in != 10000 ||
      defaults.thin != 40 || defaults.psrf_threshold != 1.10 || defaults.extend_by != 10000) {
    detail = "default protocol constants drifted";
    return false;
  }
  if (gibbs::monitored_quantities().size() != 14) {
    detail = "monitored scalar list is not the 14 required quantities";
    return false;
  }

  const validation::SyntheticTruth truth = reference_truth();
  const auto ds = validation::generate_synthetic(truth, 777);
  const PriorConfig priors = PriorConfig::defaults_for(truth.design.model_count());
  ChainConfig cfg;
  cfg.base_seed = 4242;
  const gibbs::ChainOutput one =
      gibbs::run_chain(ds.ensemble, ds.reanalysis, priors, truth.inad, cfg, 0);
  if (one.retained != 10000 || one.kept.size() != 250) {
    detail = "per-chain retention arithmetic off: retained " + std::to_string(one.retained) +
             ", kept " + std::to_string(one.kept.size());
    return false;
  }
  const gibbs::PosteriorSample sample =
      gibbs::run_until_converged(ds.ensemble, ds.reanalysis, priors, truth.inad, cfg);
  std::ostringstream os;
  os << "4 chains, burn-in 10000, window 10000, thin 40, merged " << sample.states.size()
     << " draws, gate 1.10 over " << sample.psrf.size() << " scalars, converged at "
     << sample.total_iters_per_chain << " iterations";
  detail = os.str();
  return sample.states.size() == 1000 && sample.kept_per_chain == 250 && sample.psrf.size() == 14 &&
         sample.converged;
}

bool criterion_performance(std::string& detail) {
  const validation::SyntheticTruth truth = reference_truth();
  const auto ds = validation::generate_synthetic(truth, 778);
  const PriorConfig priors = PriorConfig::defaults_for(truth.design.model_count());
  ChainConfig cfg;
  cfg.base_seed = 11;

  const auto start = std::chrono::steady_clock::now();
  for (std::size_t c = 0; c < 4; ++c) {
    gibbs::Chain chain(ds.ensemble, ds.reanalysis, priors, truth.inad, cfg, c);
    chain.advance(20000);
  }
  const auto stop = std::chrono::steady_clock::now();
  const double seconds = std::chrono::duration<double>(stop - start).count();
  std::ostringstream os;
  os << "4 chains x 20000 iterations in " << seconds << " s single-threaded";
  detail = os.str();
  return seconds <= 10.0;
}

bool criterion_loo(std::string& detail) {
  validation::SyntheticTruth truth = reference_truth();
  const PriorConfig priors = PriorConfig::defaults_for(truth.design.model_count());
  const int boxes = 100;
  int low_p = 0, above_001 = 0, failures = 0;
  for (int g = 0; g < boxes; ++g) {
    const auto ds = validation::generate_synthetic(truth, 60000 + static_cast<std::uint64_t>(g));
    try {
      const auto pits =
          validation::loo_cv_pit(ds.ensemble, ds.reanalysis, priors, truth.inad,
                                 reduced_budget(70000 + static_cast<std::uint64_t>(g)),
                                 validation::CvMode::kAllData);
      std::vector<double> values;
      values.reserve(pits.size());
      for (const auto& [id, pit] : pits) values.push_back(pit);
      const double p = validation::ks_uniform_pvalue(values);
      if (p < 0.10) ++low_p;
      if (p > 0.01) ++above_001;
    } catch (const validation::ConvergenceFailure&) {
      ++failures;
      ++low_p;  // count a failed refit against the band rather than hiding it
    }
  }
  const double frac = static_cast<double>(low_p) / boxes;
  std::ostringstream os;
  os << "fraction of KS p-values below 0.10: " << frac << " (band 0.04..0.16; p > 0.01 held in "
     << above_001 << "/100 boxes; " << failures
     << " refit failures); leave-one-out PITs are super-uniform at M = 13, so the uniform-p band "
        "is not attainable for this procedure";
  detail = os.str();
  return frac >= 0.04 && frac <= 0.16;
}

bool criterion_predictive(std::string& detail) {
  Rng state_rng(88);
  ParameterState s = ParameterState::sized(3);
  s.mu_h = 1.0;
  s.mu_f = 5.0;
  s.beta = 0.7;
  s.tau_h = 2.0;
  s.tau_f_given_h = 1.5;
  s.psi2 = 0.4;
  s.theta2 = 0.8;
  s.nu_h = 7.0;
  s.nu_f = 9.0;
  s.y_h = 2.1;
  s.y_ha = 2.0;
  s.tau_a = 3.0;
  s.mu_w = 1.9;
  s.tau_w = 4.0;
  const InadequacyConfig inad{1.2, 1.2};

  Rng rng(889);
  const std::size_t n = 1000000;
  double sum_yf = 0.0, sum_phi = 0.0, sum_phi2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const PredictiveDraw draw = gibbs::sample_predictive(s, inad, rng);
    sum_yf += draw.y_f;
    sum_phi += draw.phi_a;
    sum_phi2 += draw.phi_a * draw.phi_a;
  }
  const double mean_yf = sum_yf / static_cast<double>(n);
  const double target_yf = s.mu_f + s.beta * (s.y_h - s.mu_h);
  const double tau_delta_f = s.tau_f_given_h / (1.2 * 1.2);
  const double se_yf = std::sqrt(1.0 / tau_delta_f / static_cast<double>(n));

  const double mean_phi = sum_phi / static_cast<double>(n);
  const double var_phi = sum_phi2 / static_cast<double>(n) - mean_phi * mean_phi;
  const double se_phi = std::sqrt(var_phi / static_cast<double>(n));
  const double target_phi = 1.0 / s.theta2;

  std::ostringstream os;
  os << "mean Y_F " << mean_yf << " vs " << target_yf << "; mean phi_a " << mean_phi << " vs "
     << target_phi;
  detail = os.str();
  return std::abs(mean_yf - target_yf) < 4.0 * se_yf &&
         std::abs(mean_phi - target_phi) < 4.0 * se_phi;
}

bool criterion_determinism(std::string& detail) {
  validation::SyntheticTruth truth;
  truth.design = validation::Design::uniform(5, 2, 2, 4);
  std::vector<cli::GridboxDataset> boxes;
  for (int g = 0; g < 4; ++g) {
    const auto ds = validation::generate_synthetic(truth, 3300 + static_cast<std::uint64_t>(g));
    boxes.push_back({"cell_" + std::to_string(g), ds.ensemble, ds.reanalysis});
  }
  cli::RunConfig cfg;
  cfg.seed = 17;
  cfg.chains.base_seed = 17;
  cfg.chains.iters_initial = 800;
  cfg.chains.burn_in = 400;
  cfg.chains.extend_by = 400;
  cfg.chains.thin = 4;
  cfg.chains.max_total_iters = 8000;

  const cli::RunResult serial = cli::run_gridboxes(boxes, cfg, 1);
  const cli::RunResult parallel = cli::run_gridboxes(boxes, cfg, 8);
  const bool same = cli::summary_csv(serial) == cli::summary_csv(parallel) &&
                    cli::acceptance_csv(serial) == cli::acceptance_csv(parallel);
  detail = same ? "summary and acceptance CSVs byte-identical at parallelism 1 and 8"
                : "outputs differ between worker counts";
  return same;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<bool(std::string&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "conditional-correctness grid oracle", criterion_conditionals},
      {2, "metropolis step validity", criterion_mh},
      {3, "joint-distribution simulator agreement", criterion_geweke},
      {4, "regression dilution monte carlo", criterion_dilution},
      {5, "posterior recovery coverage", criterion_recovery},
      {6, "protocol constants", criterion_protocol},
      {7, "single-gridbox performance", criterion_performance},
      {8, "leave-one-out self-consistency", criterion_loo},
      {9, "predictive contract", criterion_predictive},
      {10, "determinism across worker counts", criterion_determinism},
  };

  bool all_ok = true;
  for (const auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = criterion.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d: %s — %s [%.1f s]\n", ok ? "PASS" : "FAIL", criterion.id,
                criterion.name, detail.c_str(), seconds);
    std::fflush(stdout);
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}
