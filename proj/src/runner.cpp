#include "coex/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <sstream>
#include <thread>

#include "coex/gibbs.hpp"
#include "coex/validation.hpp"

namespace coex::cli {

namespace {

struct GridboxResult {
  std::vector<SummaryRow> rows;
  AcceptanceRow accept;
  bool validation_failed = false;
  bool convergence_failed = false;
};

// Split-chain PSRF over the per-chain thinned series of a derived quantity;
// the monitored scalars carry the gate value from the full window instead.
double thinned_psrf(const std::vector<std::vector<double>>& per_chain) {
  if (per_chain.size() < 2 || per_chain.front().size() < 4) return 1.0;
  return diagnostics::psrf(per_chain);
}

GridboxResult process_gridbox(const GridboxDataset& box, const RunConfig& config) {
  GridboxResult result;
  result.accept.gridbox_id = box.gridbox_id;

  const ValidationReport report = validate(box.ensemble, box.reanalysis);
  if (!report.ok()) {
    result.validation_failed = true;
    SummaryRow row;
    row.gridbox_id = box.gridbox_id;
    row.quantity = "-";
    row.status = "invalid: " + report.violations.front();
    result.rows.push_back(std::move(row));
    return result;
  }

  const PriorConfig priors = config.resolve_priors(box.ensemble.model_count());
  ChainConfig chains = config.chains;
  chains.base_seed = gridbox_seed(config.seed, box.gridbox_id);

  const gibbs::PosteriorSample sample =
      gibbs::run_until_converged(box.ensemble, box.reanalysis, priors, config.inad, chains);
  result.convergence_failed = !sample.converged;
  const std::string status = sample.converged ? "ok" : "convergence_failure";

  result.accept.nu_h_accept = sample.mh_nu_h.rate();
  result.accept.nu_f_accept = sample.mh_nu_f.rate();
  result.accept.total_iters = sample.total_iters_per_chain;

  const std::size_t kept = sample.kept_per_chain;
  const std::size_t n_chains = sample.n_chains;

  struct Quantity {
    std::string name;
    std::function<double(const ParameterState&, const PredictiveDraw&)> eval;
    bool monitored;
  };
  std::vector<Quantity> quantities;
  for (const auto& mon : gibbs::monitored_quantities()) {
    auto extract = mon.extract;
    quantities.push_back(
        {mon.name, [extract](const ParameterState& s, const PredictiveDraw&) { return extract(s); },
         true});
  }
  quantities.push_back({"Y_F", [](const ParameterState&, const PredictiveDraw& p) { return p.y_f; },
                        false});
  quantities.push_back(
      {"Y_Fa", [](const ParameterState&, const PredictiveDraw& p) { return p.y_fa; }, false});
  quantities.push_back(
      {"phi_a", [](const ParameterState&, const PredictiveDraw& p) { return p.phi_a; }, false});
  quantities.push_back({"Y_F_minus_Y_H",
                        [](const ParameterState& s, const PredictiveDraw& p) { return p.y_f - s.y_h; },
                        false});
  quantities.push_back({"constraint_effect",
                        [](const ParameterState& s, const PredictiveDraw&) {
                          return (s.beta - 1.0) * (s.y_h - s.mu_h);
                        },
                        false});

  for (const Quantity& q : quantities) {
    std::vector<double> merged;
    merged.reserve(sample.states.size());
    std::vector<std::vector<double>> per_chain(n_chains);
    for (std::size_t c = 0; c < n_chains; ++c) {
      per_chain[c].reserve(kept);
      for (std::size_t i = 0; i < kept; ++i) {
        const std::size_t idx = c * kept + i;
        const double v = q.eval(sample.states[idx], sample.predictive[idx]);
        merged.push_back(v);
        per_chain[c].push_back(v);
      }
    }
    SummaryRow row;
    row.gridbox_id = box.gridbox_id;
    row.quantity = q.name;
    row.summary = diagnostics::summarize(merged);
    row.psrf = q.monitored ? sample.psrf.at(q.name) : thinned_psrf(per_chain);
    row.status = status;
    result.rows.push_back(std::move(row));
  }

  std::sort(result.rows.begin(), result.rows.end(),
            [](const SummaryRow& a, const SummaryRow& b) { return a.quantity < b.quantity; });
  return result;
}

}  // namespace

std::uint64_t gridbox_seed(std::uint64_t base_seed, const std::string& gridbox_id) {
  return mix_seed(base_seed, fnv1a64(gridbox_id));
}

RunResult run_gridboxes(const std::vector<GridboxDataset>& gridboxes, const RunConfig& config,
                        unsigned parallelism) {
  std::vector<std::size_t> order(gridboxes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return gridboxes[a].gridbox_id < gridboxes[b].gridbox_id;
  });

  std::vector<GridboxResult> results(gridboxes.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= order.size()) return;
      const std::size_t idx = order[k];
      results[idx] = process_gridbox(gridboxes[idx], config);
    }
  };

  const unsigned n_workers = std::max(1u, parallelism);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  RunResult out;
  bool any_invalid = false;
  bool any_unconverged = false;
  for (std::size_t k : order) {
    const GridboxResult& r = results[k];
    any_invalid = any_invalid || r.validation_failed;
    any_unconverged = any_unconverged || r.convergence_failed;
    out.rows.insert(out.rows.end(), r.rows.begin(), r.rows.end());
    if (!r.validation_failed) out.accepts.push_back(r.accept);
  }
  if (any_invalid) {
    out.exit_code = kExitValidation;
  } else if (any_unconverged) {
    out.exit_code = kExitConvergence;
  }
  return out;
}

std::string summary_csv(const RunResult& result) {
  std::ostringstream out;
  out << "gridbox_id,quantity,mean,sd,q05,q25,q50,q75,q95,mcse,psrf,status\n";
  for (const SummaryRow& row : result.rows) {
    if (row.quantity == "-") {
      out << row.gridbox_id << ",-,,,,,,,,,," << row.status << '\n';
      continue;
    }
    const auto& s = row.summary;
    out << row.gridbox_id << ',' << row.quantity << ',' << format_double(s.mean) << ','
        << format_double(s.sd) << ',' << format_double(s.q05) << ',' << format_double(s.q25) << ','
        << format_double(s.q50) << ',' << format_double(s.q75) << ',' << format_double(s.q95) << ','
        << format_double(s.mcse) << ',' << format_double(row.psrf) << ',' << row.status << '\n';
  }
  return out.str();
}

std::string acceptance_csv(const RunResult& result) {
  std::ostringstream out;
  out << "gridbox_id,nu_h_accept,nu_f_accept,total_iters\n";
  for (const AcceptanceRow& row : result.accepts) {
    out << row.gridbox_id << ',' << format_double(row.nu_h_accept) << ','
        << format_double(row.nu_f_accept) << ',' << row.total_iters << '\n';
  }
  return out.str();
}

}  // namespace coex::cli
