// Python bindings exposing the main operations: data validation, the joint
// density, full-protocol fitting, synthetic data generation, leave-one-out
// cross validation, and the diagnostics/analytic formulas.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "coex/data.hpp"
#include "coex/diagnostics.hpp"
#include "coex/gibbs.hpp"
#include "coex/log_joint.hpp"
#include "coex/validation.hpp"

namespace py = pybind11;
using namespace coex;

namespace {

EnsembleData make_ensemble(
    const std::vector<std::tuple<std::string, std::vector<double>, std::vector<double>>>& models) {
  EnsembleData data;
  for (const auto& [id, hist, fut] : models) {
    data.models.push_back({id, hist, fut});
  }
  return data;
}

py::dict sample_to_dict(const gibbs::PosteriorSample& sample) {
  py::dict draws;
  for (const auto& mon : gibbs::monitored_quantities()) {
    std::vector<double> series;
    series.reserve(sample.states.size());
    for (const auto& s : sample.states) series.push_back(mon.extract(s));
    draws[py::str(mon.name)] = series;
  }
  std::vector<double> y_f, y_fa, phi_a, response, constraint;
  for (std::size_t i = 0; i < sample.states.size(); ++i) {
    y_f.push_back(sample.predictive[i].y_f);
    y_fa.push_back(sample.predictive[i].y_fa);
    phi_a.push_back(sample.predictive[i].phi_a);
    response.push_back(sample.predictive[i].y_f - sample.states[i].y_h);
    constraint.push_back((sample.states[i].beta - 1.0) *
                         (sample.states[i].y_h - sample.states[i].mu_h));
  }
  draws["Y_F"] = y_f;
  draws["Y_Fa"] = y_fa;
  draws["phi_a"] = phi_a;
  draws["Y_F_minus_Y_H"] = response;
  draws["constraint_effect"] = constraint;

  py::dict out;
  out["draws"] = draws;
  out["psrf"] = sample.psrf;
  out["converged"] = sample.converged;
  out["total_iters_per_chain"] = sample.total_iters_per_chain;
  out["kept_per_chain"] = sample.kept_per_chain;
  out["n_chains"] = sample.n_chains;
  out["accept_nu_h"] = sample.mh_nu_h.rate();
  out["accept_nu_f"] = sample.mh_nu_f.rate();
  return out;
}

py::dict summary_to_dict(const diagnostics::Summary& s) {
  py::dict d;
  d["mean"] = s.mean;
  d["sd"] = s.sd;
  d["q05"] = s.q05;
  d["q25"] = s.q25;
  d["q50"] = s.q50;
  d["q75"] = s.q75;
  d["q95"] = s.q95;
  d["mcse"] = s.mcse;
  d["n"] = s.n;
  d["mcse_defined"] = s.mcse_defined;
  return d;
}

}  // namespace

PYBIND11_MODULE(pycoex, m) {
  m.doc() = "Coexchangeable multi-model ensemble inference";

  py::class_<EnsembleData>(m, "EnsembleData")
      .def(py::init(&make_ensemble), py::arg("models"),
           "models: list of (model_id, hist_runs, fut_runs)")
      .def_property_readonly("model_count", &EnsembleData::model_count)
      .def("model_ids", [](const EnsembleData& d) {
        std::vector<std::string> ids;
        for (const auto& model : d.models) ids.push_back(model.model_id);
        return ids;
      });

  py::class_<ReanalysisData>(m, "ReanalysisData")
      .def(py::init([](std::vector<double> values) { return ReanalysisData{std::move(values)}; }),
           py::arg("values"))
      .def_property_readonly("size", &ReanalysisData::size);

  py::class_<PriorConfig>(m, "PriorConfig")
      .def(py::init<>())
      .def_static("defaults_for", &PriorConfig::defaults_for, py::arg("model_count"))
      .def_readwrite("a_mu_h", &PriorConfig::a_mu_h)
      .def_readwrite("b_mu_h", &PriorConfig::b_mu_h)
      .def_readwrite("b_mu_f", &PriorConfig::b_mu_f)
      .def_readwrite("a_beta", &PriorConfig::a_beta)
      .def_readwrite("b_beta", &PriorConfig::b_beta)
      .def_readwrite("a_tau_h", &PriorConfig::a_tau_h)
      .def_readwrite("b_tau_h", &PriorConfig::b_tau_h)
      .def_readwrite("a_tau_f", &PriorConfig::a_tau_f)
      .def_readwrite("b_tau_f", &PriorConfig::b_tau_f)
      .def_readwrite("a_psi2", &PriorConfig::a_psi2)
      .def_readwrite("b_psi2", &PriorConfig::b_psi2)
      .def_readwrite("a_theta2", &PriorConfig::a_theta2)
      .def_readwrite("b_theta2", &PriorConfig::b_theta2)
      .def_readwrite("a_nu_h", &PriorConfig::a_nu_h)
      .def_readwrite("b_nu_h", &PriorConfig::b_nu_h)
      .def_readwrite("a_nu_f", &PriorConfig::a_nu_f)
      .def_readwrite("b_nu_f", &PriorConfig::b_nu_f)
      .def_readwrite("a_tau_w", &PriorConfig::a_tau_w)
      .def_readwrite("b_tau_w", &PriorConfig::b_tau_w);

  py::class_<InadequacyConfig>(m, "InadequacyConfig")
      .def(py::init<>())
      .def(py::init([](double kappa, double kappa_w) {
             return InadequacyConfig{kappa, kappa_w};
           }),
           py::arg("kappa"), py::arg("kappa_w"))
      .def_readwrite("kappa", &InadequacyConfig::kappa)
      .def_readwrite("kappa_w", &InadequacyConfig::kappa_w);

  py::class_<ChainConfig>(m, "ChainConfig")
      .def(py::init<>())
      .def_readwrite("n_chains", &ChainConfig::n_chains)
      .def_readwrite("iters_initial", &ChainConfig::iters_initial)
      .def_readwrite("burn_in", &ChainConfig::burn_in)
      .def_readwrite("extend_by", &ChainConfig::extend_by)
      .def_readwrite("thin", &ChainConfig::thin)
      .def_readwrite("psrf_threshold", &ChainConfig::psrf_threshold)
      .def_readwrite("max_total_iters", &ChainConfig::max_total_iters)
      .def_readwrite("lambda_h", &ChainConfig::lambda_h)
      .def_readwrite("lambda_f", &ChainConfig::lambda_f)
      .def_readwrite("adapt_lambda", &ChainConfig::adapt_lambda)
      .def_readwrite("base_seed", &ChainConfig::base_seed);

  py::class_<ParameterState>(m, "ParameterState")
      .def_static("sized", &ParameterState::sized, py::arg("model_count"))
      .def_readwrite("mu_h", &ParameterState::mu_h)
      .def_readwrite("mu_f", &ParameterState::mu_f)
      .def_readwrite("beta", &ParameterState::beta)
      .def_readwrite("tau_h", &ParameterState::tau_h)
      .def_readwrite("tau_f_given_h", &ParameterState::tau_f_given_h)
      .def_readwrite("psi2", &ParameterState::psi2)
      .def_readwrite("theta2", &ParameterState::theta2)
      .def_readwrite("nu_h", &ParameterState::nu_h)
      .def_readwrite("nu_f", &ParameterState::nu_f)
      .def_readwrite("x_hm", &ParameterState::x_hm)
      .def_readwrite("x_fm", &ParameterState::x_fm)
      .def_readwrite("tau_m", &ParameterState::tau_m)
      .def_readwrite("phi_m", &ParameterState::phi_m)
      .def_readwrite("y_h", &ParameterState::y_h)
      .def_readwrite("y_ha", &ParameterState::y_ha)
      .def_readwrite("tau_a", &ParameterState::tau_a)
      .def_readwrite("mu_w", &ParameterState::mu_w)
      .def_readwrite("tau_w", &ParameterState::tau_w)
      .def("positivity_ok", &ParameterState::positivity_ok);

  m.def("validate", [](const EnsembleData& data, const ReanalysisData& rean) {
    const ValidationReport report = validate(data, rean);
    return py::make_tuple(report.violations, report.warnings);
  });

  m.def(
      "derived",
      [](const ParameterState& s, const InadequacyConfig& cfg) {
        const DerivedPrecisions d = derived(s, cfg);
        py::dict out;
        out["tau_delta_h"] = d.tau_delta_h;
        out["tau_delta_f"] = d.tau_delta_f;
        out["tau_delta_w"] = d.tau_delta_w;
        out["nu_ha"] = d.nu_ha;
        out["nu_fa"] = d.nu_fa;
        return out;
      },
      py::arg("state"), py::arg("inadequacy"));

  m.def("log_joint", &log_joint, py::arg("state"), py::arg("data"), py::arg("reanalysis"),
        py::arg("priors"), py::arg("inadequacy"));

  m.def(
      "fit",
      [](const EnsembleData& data, const ReanalysisData& rean, const PriorConfig& priors,
         const InadequacyConfig& inad, const ChainConfig& chains) {
        return sample_to_dict(gibbs::run_until_converged(data, rean, priors, inad, chains));
      },
      py::arg("data"), py::arg("reanalysis"), py::arg("priors"), py::arg("inadequacy"),
      py::arg("chains"),
      "Run the full multi-chain protocol and return merged thinned draws with diagnostics.");

  py::class_<validation::Design>(m, "Design")
      .def(py::init<>())
      .def_static("reference", &validation::Design::reference)
      .def_static("uniform", &validation::Design::uniform, py::arg("models"),
                  py::arg("runs_hist"), py::arg("runs_fut"), py::arg("n_reanalysis"))
      .def_readwrite("hist_runs", &validation::Design::hist_runs)
      .def_readwrite("fut_runs", &validation::Design::fut_runs)
      .def_readwrite("n_reanalysis", &validation::Design::n_reanalysis);

  py::class_<validation::SyntheticTruth>(m, "SyntheticTruth")
      .def(py::init<>())
      .def_readwrite("mu_h", &validation::SyntheticTruth::mu_h)
      .def_readwrite("mu_f", &validation::SyntheticTruth::mu_f)
      .def_readwrite("beta", &validation::SyntheticTruth::beta)
      .def_readwrite("tau_h", &validation::SyntheticTruth::tau_h)
      .def_readwrite("tau_f_given_h", &validation::SyntheticTruth::tau_f_given_h)
      .def_readwrite("psi2", &validation::SyntheticTruth::psi2)
      .def_readwrite("theta2", &validation::SyntheticTruth::theta2)
      .def_readwrite("nu_h", &validation::SyntheticTruth::nu_h)
      .def_readwrite("nu_f", &validation::SyntheticTruth::nu_f)
      .def_readwrite("tau_w", &validation::SyntheticTruth::tau_w)
      .def_readwrite("inad", &validation::SyntheticTruth::inad)
      .def_readwrite("design", &validation::SyntheticTruth::design);

  m.def(
      "generate_synthetic",
      [](const validation::SyntheticTruth& truth, std::uint64_t seed) {
        const validation::SyntheticDataset ds = validation::generate_synthetic(truth, seed);
        py::dict latents;
        latents["x_hm"] = ds.latents.x_hm;
        latents["x_fm"] = ds.latents.x_fm;
        latents["tau_m"] = ds.latents.tau_m;
        latents["phi_m"] = ds.latents.phi_m;
        latents["y_h"] = ds.latents.y_h;
        latents["y_ha"] = ds.latents.y_ha;
        latents["tau_a"] = ds.latents.tau_a;
        latents["mu_w"] = ds.latents.mu_w;
        return py::make_tuple(ds.ensemble, ds.reanalysis, latents);
      },
      py::arg("truth"), py::arg("seed"));

  m.def(
      "loo_cv_pit",
      [](const EnsembleData& data, const ReanalysisData& rean, const PriorConfig& priors,
         const InadequacyConfig& inad, const ChainConfig& chains, const std::string& mode) {
        const validation::CvMode cv_mode =
            mode == "future" ? validation::CvMode::kFutureOnly : validation::CvMode::kAllData;
        return validation::loo_cv_pit(data, rean, priors, inad, chains, cv_mode);
      },
      py::arg("data"), py::arg("reanalysis"), py::arg("priors"), py::arg("inadequacy"),
      py::arg("chains"), py::arg("mode") = "all");

  m.def("ks_uniform_pvalue", [](const std::vector<double>& pits) {
    return validation::ks_uniform_pvalue(pits);
  });
  m.def("dilution_expectation", &validation::dilution_expectation, py::arg("beta_prime"),
        py::arg("sigma_h2"), py::arg("sigma2"), py::arg("runs"));
  m.def("coexchangeable_shrinkage", &validation::coexchangeable_shrinkage, py::arg("beta"),
        py::arg("kappa"), py::arg("sigma_h2"), py::arg("d_h2"));
  m.def("ensemble_regression", [](const EnsembleData& data) {
    const validation::ERFit fit = validation::ensemble_regression(data);
    py::dict out;
    out["beta_prime_hat"] = fit.beta_prime_hat;
    out["mean_response"] = fit.mean_response;
    out["mean_hist"] = fit.mean_hist;
    return out;
  });

  m.def(
      "conditional_grid_check",
      [](std::uint64_t seed, int n_states) {
        std::map<std::string, double> out;
        for (const auto& r : validation::conditional_grid_check(seed, n_states)) {
          out[r.name] = r.max_rel_err;
        }
        return out;
      },
      py::arg("seed") = 2024, py::arg("n_states") = 5,
      "Max relative error of each closed-form conditional against the joint-density slice.");

  m.def(
      "geweke_joint_test",
      [](std::size_t n_draws, std::uint64_t seed) {
        const validation::GewekeResult r = validation::geweke_joint_test(n_draws, seed);
        std::map<std::string, double> out;
        for (std::size_t i = 0; i < r.names.size(); ++i) out[r.names[i]] = r.z[i];
        return out;
      },
      py::arg("n_draws") = 4000, py::arg("seed") = 1,
      "Z-scores comparing prior-generative and sweep-based simulator moments.");

  m.def("psrf", [](const std::vector<std::vector<double>>& chains) {
    return diagnostics::psrf(chains);
  });
  m.def("mcse_batch_means", [](const std::vector<double>& series) {
    return diagnostics::mcse_batch_means(series);
  });
  m.def("summarize", [](const std::vector<double>& samples) {
    return summary_to_dict(diagnostics::summarize(samples));
  });
  m.def("correlations", [](const std::vector<std::vector<double>>& draws) {
    const diagnostics::CorrelationResult r = diagnostics::correlations(draws);
    return py::make_tuple(r.matrix, r.zero_variance);
  });
}
