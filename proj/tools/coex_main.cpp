// Batch front end: per-gridbox inference on gridded ensemble/reanalysis CSV
// files, synthetic data generation, cross-validation reports, the analytic
// dilution table, and the built-in correctness checks.
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "coex/csv_io.hpp"
#include "coex/gibbs.hpp"
#include "coex/runner.hpp"
#include "coex/validation.hpp"

namespace {

using namespace coex;

cli::RunConfig load_config_or_default(const std::string& path) {
  if (path.empty()) return cli::RunConfig{};
  return cli::load_run_config(path);
}

int cmd_run(const std::string& ensemble_path, const std::string& reanalysis_path,
            const std::string& config_path, const std::string& output_path,
            const std::string& accept_path, unsigned parallelism,
            const std::vector<std::string>& models) {
  cli::RunConfig config = load_config_or_default(config_path);
  if (!models.empty()) config.model_subset = models;

  const auto ensembles = cli::load_ensemble_csv(ensemble_path, config.model_subset);
  const auto reanalyses = cli::load_reanalysis_csv(reanalysis_path);
  const auto gridboxes = cli::join_gridboxes(ensembles, reanalyses);
  if (gridboxes.empty()) {
    std::cerr << "no gridboxes found in input\n";
    return cli::kExitValidation;
  }

  const cli::RunResult result = cli::run_gridboxes(gridboxes, config, parallelism);

  std::ofstream out(output_path);
  if (!out) {
    std::cerr << output_path << ": cannot open for writing\n";
    return cli::kExitIo;
  }
  out << cli::summary_csv(result);
  if (!accept_path.empty()) {
    std::ofstream side(accept_path);
    if (!side) {
      std::cerr << accept_path << ": cannot open for writing\n";
      return cli::kExitIo;
    }
    side << cli::acceptance_csv(result);
  }
  for (const auto& row : result.rows) {
    if (row.quantity == "-") {
      std::cerr << row.gridbox_id << ": " << row.status << "\n";
    }
  }
  return result.exit_code;
}

int cmd_synth(std::size_t gridboxes, std::uint64_t seed, const std::string& prefix,
              bool reference_design, std::size_t models, std::size_t hist_runs,
              std::size_t fut_runs, std::size_t n_reanalysis, double mu_h, double mu_f,
              double beta, double sigma_h2, double sigma_f2, double psi2, double theta2,
              double nu_h, double nu_f, double sigma_w2, double kappa, double kappa_w) {
  validation::SyntheticTruth truth;
  truth.design = reference_design
                     ? validation::Design::reference()
                     : validation::Design::uniform(models, hist_runs, fut_runs, n_reanalysis);
  truth.design.n_reanalysis = n_reanalysis;
  truth.mu_h = mu_h;
  truth.mu_f = mu_f;
  truth.beta = beta;
  truth.tau_h = 1.0 / sigma_h2;
  truth.tau_f_given_h = 1.0 / sigma_f2;
  truth.psi2 = psi2;
  truth.theta2 = theta2;
  truth.nu_h = nu_h;
  truth.nu_f = nu_f;
  truth.tau_w = 1.0 / sigma_w2;
  truth.inad.kappa = kappa;
  truth.inad.kappa_w = kappa_w;

  std::vector<cli::GridboxDataset> boxes;
  std::ofstream latents(prefix + "_truth.csv");
  if (!latents) {
    std::cerr << prefix << "_truth.csv: cannot open for writing\n";
    return cli::kExitIo;
  }
  latents << "gridbox_id,quantity,value\n";
  for (std::size_t g = 0; g < gridboxes; ++g) {
    std::string gid = "g" + std::to_string(g);
    const auto ds = validation::generate_synthetic(truth, mix_seed(seed, g));
    boxes.push_back({gid, ds.ensemble, ds.reanalysis});
    auto put = [&](const std::string& name, double v) {
      latents << gid << ',' << name << ',' << cli::format_double(v) << '\n';
    };
    put("mu_H", truth.mu_h);
    put("mu_F", truth.mu_f);
    put("beta", truth.beta);
    put("sigma_H2", sigma_h2);
    put("sigma_F2", sigma_f2);
    put("psi2", truth.psi2);
    put("theta2", truth.theta2);
    put("nu_H", truth.nu_h);
    put("nu_F", truth.nu_f);
    put("sigma_W2", sigma_w2);
    put("Y_H", ds.latents.y_h);
    put("Y_Ha", ds.latents.y_ha);
    put("mu_W", ds.latents.mu_w);
  }
  cli::write_ensemble_csv(prefix + "_ensemble.csv", boxes);
  cli::write_reanalysis_csv(prefix + "_reanalysis.csv", boxes);
  std::cout << "wrote " << prefix << "_ensemble.csv, " << prefix << "_reanalysis.csv, " << prefix
            << "_truth.csv\n";
  return cli::kExitOk;
}

int cmd_cv(const std::string& ensemble_path, const std::string& reanalysis_path,
           const std::string& config_path, const std::string& mode_name,
           const std::string& output_path) {
  const cli::RunConfig config = load_config_or_default(config_path);
  const auto ensembles = cli::load_ensemble_csv(ensemble_path, config.model_subset);
  const auto reanalyses = cli::load_reanalysis_csv(reanalysis_path);
  const auto gridboxes = cli::join_gridboxes(ensembles, reanalyses);

  const validation::CvMode mode =
      mode_name == "future" ? validation::CvMode::kFutureOnly : validation::CvMode::kAllData;

  std::ofstream out(output_path);
  if (!out) {
    std::cerr << output_path << ": cannot open for writing\n";
    return cli::kExitIo;
  }
  out << "gridbox_id,model_id,pit,ks_p\n";
  int exit_code = cli::kExitOk;
  for (const auto& box : gridboxes) {
    const ValidationReport report = validate(box.ensemble, box.reanalysis);
    if (!report.ok()) {
      std::cerr << box.gridbox_id << ": invalid: " << report.violations.front() << "\n";
      exit_code = cli::kExitValidation;
      continue;
    }
    ChainConfig chains = config.chains;
    chains.base_seed = cli::gridbox_seed(config.seed, box.gridbox_id);
    const PriorConfig priors = config.resolve_priors(box.ensemble.model_count());
    try {
      const auto pits =
          validation::loo_cv_pit(box.ensemble, box.reanalysis, priors, config.inad, chains, mode);
      std::vector<double> values;
      values.reserve(pits.size());
      for (const auto& [id, pit] : pits) values.push_back(pit);
      const double ks_p = validation::ks_uniform_pvalue(values);
      for (const auto& [id, pit] : pits) {
        out << box.gridbox_id << ',' << id << ',' << cli::format_double(pit) << ','
            << cli::format_double(ks_p) << '\n';
      }
    } catch (const validation::ConvergenceFailure& e) {
      std::cerr << box.gridbox_id << ": " << e.what() << "\n";
      exit_code = cli::kExitConvergence;
    }
  }
  return exit_code;
}

int cmd_dilution(std::size_t reps, std::size_t models, double sigma_h2, double sigma2,
                 std::uint64_t seed, const std::string& output_path) {
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!output_path.empty()) {
    file.open(output_path);
    if (!file) {
      std::cerr << output_path << ": cannot open for writing\n";
      return cli::kExitIo;
    }
    out = &file;
  }
  *out << "beta_prime,runs,analytic,mc_mean,mc_se,z\n";
  Rng rng(seed);
  for (double beta_prime : {0.0, 0.5, 1.0}) {
    for (double runs : {1.0, 2.0, 5.0, 10.0}) {
      std::vector<double> slopes;
      slopes.reserve(reps);
      for (std::size_t r = 0; r < reps; ++r) {
        EnsembleData data;
        data.models.resize(models);
        const double run_sd = std::sqrt(sigma2);
        for (std::size_t m = 0; m < models; ++m) {
          const double x_hm = rng.normal(0.0, std::sqrt(sigma_h2));
          const double x_fm = 2.0 + (beta_prime + 1.0) * x_hm + rng.normal(0.0, 0.5);
          data.models[m].model_id = "m" + std::to_string(m);
          for (double s = 0; s < runs; ++s) {
            data.models[m].hist_runs.push_back(x_hm + rng.normal(0.0, run_sd));
            data.models[m].fut_runs.push_back(x_fm + rng.normal(0.0, run_sd));
          }
        }
        slopes.push_back(validation::ensemble_regression(data).beta_prime_hat);
      }
      double mean = 0.0;
      for (double s : slopes) mean += s;
      mean /= static_cast<double>(reps);
      double var = 0.0;
      for (double s : slopes) var += (s - mean) * (s - mean);
      var /= static_cast<double>(reps - 1);
      const double se = std::sqrt(var / static_cast<double>(reps));
      const double analytic = validation::dilution_expectation(beta_prime, sigma_h2, sigma2, runs);
      *out << cli::format_double(beta_prime) << ',' << cli::format_double(runs) << ','
           << cli::format_double(analytic) << ',' << cli::format_double(mean) << ','
           << cli::format_double(se) << ',' << cli::format_double((mean - analytic) / se) << '\n';
    }
  }
  return cli::kExitOk;
}

int cmd_check(int grid_states, std::size_t geweke_draws, std::uint64_t seed) {
  bool all_ok = true;

  const auto grid = validation::conditional_grid_check(seed, grid_states);
  for (const auto& r : grid) {
    const bool ok = r.max_rel_err < 1e-6;
    all_ok = all_ok && ok;
    std::printf("%s conditional %-14s max rel err %.3g\n", ok ? "PASS" : "FAIL", r.name.c_str(),
                r.max_rel_err);
  }

  const auto geweke = validation::geweke_joint_test(geweke_draws, seed + 1);
  double worst = 0.0;
  std::string worst_name;
  for (std::size_t i = 0; i < geweke.z.size(); ++i) {
    if (std::abs(geweke.z[i]) > std::abs(worst)) {
      worst = geweke.z[i];
      worst_name = geweke.names[i];
    }
  }
  const bool geweke_ok = std::abs(worst) <= 4.0;
  all_ok = all_ok && geweke_ok;
  std::printf("%s joint simulator test: %zu moments, worst z %+.2f (%s)\n",
              geweke_ok ? "PASS" : "FAIL", geweke.z.size(), worst, worst_name.c_str());

  return all_ok ? cli::kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coexchangeable multi-model ensemble inference"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Per-gridbox inference on CSV inputs");
  std::string ensemble_path, reanalysis_path, config_path, output_path = "summary.csv";
  std::string accept_path;
  unsigned parallelism = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::string> models;
  run->add_option("--ensemble", ensemble_path, "Ensemble CSV")->required();
  run->add_option("--reanalysis", reanalysis_path, "Reanalysis CSV")->required();
  run->add_option("--config", config_path, "JSON configuration");
  run->add_option("--output", output_path, "Summary CSV output path");
  run->add_option("--acceptance-out", accept_path, "Acceptance-rate sidecar CSV path");
  run->add_option("--parallel", parallelism, "Worker count");
  run->add_option("--models", models, "Model subset filter")->delimiter(',');

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset plus truth file");
  std::size_t n_gridboxes = 1, s_models = 13, s_hist = 3, s_fut = 3, s_rean = 4;
  std::uint64_t synth_seed = 0;
  std::string prefix = "synthetic";
  bool reference_design = false;
  double t_mu_h = 0.0, t_mu_f = 4.0, t_beta = 0.7, t_sh2 = 1.0, t_sf2 = 0.5, t_psi2 = 0.1,
         t_theta2 = 1.0, t_nu_h = 8.0, t_nu_f = 8.0, t_sw2 = 1.0, t_kappa = 1.2, t_kappa_w = 1.2;
  synth->add_option("--gridboxes", n_gridboxes, "Number of gridboxes");
  synth->add_option("--seed", synth_seed, "Base seed");
  synth->add_option("--prefix", prefix, "Output file prefix");
  synth->add_flag("--reference-design", reference_design,
                  "Use the 13-model reference design (50 hist / 39 fut runs)");
  synth->add_option("--models", s_models, "Model count for the uniform design");
  synth->add_option("--hist-runs", s_hist, "Historical runs per model");
  synth->add_option("--fut-runs", s_fut, "Future runs per model");
  synth->add_option("--reanalyses", s_rean, "Reanalysis count");
  synth->add_option("--mu-h", t_mu_h, "True representative historical climate");
  synth->add_option("--mu-f", t_mu_f, "True representative future climate");
  synth->add_option("--beta", t_beta, "True emergent constraint slope");
  synth->add_option("--sigma-h2", t_sh2, "True model spread variance");
  synth->add_option("--sigma-f2", t_sf2, "True conditional response variance");
  synth->add_option("--psi2", t_psi2, "True representative internal variability");
  synth->add_option("--theta2", t_theta2, "True change in internal variability");
  synth->add_option("--nu-h", t_nu_h, "True historical degrees of freedom");
  synth->add_option("--nu-f", t_nu_f, "True future degrees of freedom");
  synth->add_option("--sigma-w2", t_sw2, "True reanalysis spread variance");
  synth->add_option("--kappa", t_kappa, "Discrepancy inflation");
  synth->add_option("--kappa-w", t_kappa_w, "Reanalysis discrepancy inflation");

  // cv
  auto* cv = app.add_subcommand("cv", "Leave-one-out PIT / KS uniformity report");
  std::string cv_ensemble, cv_reanalysis, cv_config, cv_mode = "all";
  std::string cv_output = "cv.csv";
  cv->add_option("--ensemble", cv_ensemble, "Ensemble CSV")->required();
  cv->add_option("--reanalysis", cv_reanalysis, "Reanalysis CSV")->required();
  cv->add_option("--config", cv_config, "JSON configuration");
  cv->add_option("--mode", cv_mode, "all | future")->check(CLI::IsMember({"all", "future"}));
  cv->add_option("--output", cv_output, "Report CSV path");

  // dilution
  auto* dilution = app.add_subcommand("dilution", "Monte Carlo vs analytic slope dilution table");
  std::size_t d_reps = 2000, d_models = 20;
  double d_sh2 = 1.0, d_s2 = 1.0;
  std::uint64_t d_seed = 0;
  std::string d_output;
  dilution->add_option("--reps", d_reps, "Replicates per table row");
  dilution->add_option("--models", d_models, "Models per synthetic ensemble");
  dilution->add_option("--sigma-h2", d_sh2, "Model spread variance");
  dilution->add_option("--sigma2", d_s2, "Internal variability variance");
  dilution->add_option("--seed", d_seed, "Seed");
  dilution->add_option("--output", d_output, "Output CSV (default stdout)");

  // check
  auto* check = app.add_subcommand("check", "Conditional grid oracle and joint simulator test");
  int c_states = 5;
  std::size_t c_draws = 4000;
  std::uint64_t c_seed = 2024;
  check->add_option("--states", c_states, "Random states per conditional");
  check->add_option("--draws", c_draws, "Simulator draws");
  check->add_option("--seed", c_seed, "Seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(ensemble_path, reanalysis_path, config_path, output_path, accept_path,
                     parallelism, models);
    }
    if (synth->parsed()) {
      return cmd_synth(n_gridboxes, synth_seed, prefix, reference_design, s_models, s_hist, s_fut,
                       s_rean, t_mu_h, t_mu_f, t_beta, t_sh2, t_sf2, t_psi2, t_theta2, t_nu_h,
                       t_nu_f, t_sw2, t_kappa, t_kappa_w);
    }
    if (cv->parsed()) {
      return cmd_cv(cv_ensemble, cv_reanalysis, cv_config, cv_mode, cv_output);
    }
    if (dilution->parsed()) {
      return cmd_dilution(d_reps, d_models, d_sh2, d_s2, d_seed, d_output);
    }
    if (check->parsed()) {
      return cmd_check(c_states, c_draws, c_seed);
    }
  } catch (const coex::cli::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return coex::cli::kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return coex::cli::kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
