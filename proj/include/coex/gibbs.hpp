// Metropolis-within-Gibbs sampler and the multi-chain protocol runner.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "coex/config.hpp"
#include "coex/conditionals.hpp"
#include "coex/data.hpp"
#include "coex/rng.hpp"
#include "coex/state.hpp"

namespace coex::gibbs {

// Moment-based center used for chain initialization, before over-dispersion.
ParameterState init_center_state(const EnsembleData& data, const ReanalysisData& rean,
                                 const PriorConfig& priors, const InadequacyConfig& cfg);

// Over-dispersed deterministic start for one chain: positive quantities are
// scaled by a factor in [1/4, 4], locations shifted by up to two pooled SDs,
// precisions clamped to [1e-8, 1e8] afterwards.
ParameterState init_chain_state(const EnsembleData& data, const ReanalysisData& rean,
                                const PriorConfig& priors, const InadequacyConfig& cfg,
                                std::uint64_t seed, std::size_t chain_index);

// Block updates; each mutates only its own quantities, drawing from the
// conditionals given the current values of everything else.
void update_system_block(ParameterState& s, const InadequacyConfig& cfg, Rng& rng);
void update_reanalysis_block(ParameterState& s, const ReanalysisData& rean,
                             const PriorConfig& priors, const InadequacyConfig& cfg, Rng& rng);
void update_model_block(ParameterState& s, const EnsembleData& data, Rng& rng);
void update_ensemble_block(ParameterState& s, const EnsembleData& data, const PriorConfig& priors,
                           const InadequacyConfig& cfg, Rng& rng);

// Log Hastings ratio for a Gamma(nu*lambda, lambda) proposal against an
// arbitrary log target; exposed separately so the identity move can be checked
// to give exactly zero.
double mh_log_ratio(double current, double proposed, double lambda,
                    const std::function<double(double)>& log_target);

// One Metropolis-Hastings step with proposal Gamma(current*lambda, lambda).
// Returns the (possibly unchanged) value and whether the move was accepted.
// Non-finite or non-positive proposals are rejected and count as attempts.
struct MhStep {
  double value;
  bool accepted;
};
MhStep mh_gamma_step(double current, double lambda, const std::function<double(double)>& log_target,
                     Rng& rng);

enum class NuKind { kHist, kFut };

bool mh_update_nu(ParameterState& s, NuKind which, double lambda, const PriorConfig& priors,
                  const InadequacyConfig& cfg, Rng& rng);

// One full sweep: system, reanalysis, model, ensemble blocks, then the two
// Metropolis steps. Returns the two acceptance flags.
struct SweepResult {
  bool accepted_nu_h;
  bool accepted_nu_f;
};
SweepResult gibbs_sweep(ParameterState& s, const EnsembleData& data, const ReanalysisData& rean,
                        const PriorConfig& priors, const InadequacyConfig& cfg, double lambda_h,
                        double lambda_f, Rng& rng);

// Predictive quantities sampled after the fact; the state is not modified.
PredictiveDraw sample_predictive(const ParameterState& s, const InadequacyConfig& cfg, Rng& rng);

struct MhStats {
  std::size_t accepted = 0;
  std::size_t attempts = 0;

  double rate() const { return attempts == 0 ? 0.0 : static_cast<double>(accepted) / attempts; }
};

// A single chain with its private random stream and a ring buffer holding the
// final retention window (iters_initial - burn_in states).
class Chain {
 public:
  Chain(const EnsembleData& data, const ReanalysisData& rean, const PriorConfig& priors,
        const InadequacyConfig& inad, const ChainConfig& cfg, std::size_t chain_index);

  void advance(std::size_t n_iters);

  // States of the retention window in iteration order (valid once
  // total_iters() >= iters_initial).
  std::vector<const ParameterState*> window() const;

  // Every thin-th state of the window, offsets thin-1, 2*thin-1, ...
  std::vector<ParameterState> thinned() const;

  std::size_t total_iters() const { return iter_; }
  std::size_t window_len() const { return window_len_; }
  const ParameterState& state() const { return state_; }
  const MhStats& mh_nu_h() const { return mh_h_; }
  const MhStats& mh_nu_f() const { return mh_f_; }
  double lambda_h() const { return lambda_h_; }
  double lambda_f() const { return lambda_f_; }
  Rng& rng() { return rng_; }

 private:
  const EnsembleData* data_;
  const ReanalysisData* rean_;
  PriorConfig priors_;
  InadequacyConfig inad_;
  ChainConfig cfg_;
  Rng rng_;
  ParameterState state_;
  std::vector<ParameterState> ring_;
  std::size_t window_len_;
  std::size_t iter_ = 0;
  double lambda_h_;
  double lambda_f_;
  MhStats mh_h_;  // post-burn-in only
  MhStats mh_f_;
};

struct ChainOutput {
  std::vector<ParameterState> kept;        // thinned states
  std::vector<PredictiveDraw> predictive;  // one per kept state
  std::size_t retained = 0;                // window length before thinning
  std::size_t total_iters = 0;
  MhStats mh_nu_h;
  MhStats mh_nu_f;
};

ChainOutput run_chain(const EnsembleData& data, const ReanalysisData& rean,
                      const PriorConfig& priors, const InadequacyConfig& inad,
                      const ChainConfig& cfg, std::size_t chain_index);

// Scalars monitored for convergence: the nine ensemble parameters plus
// y_h, y_ha, tau_a, mu_w, tau_w.
struct Monitor {
  std::string name;
  double (*extract)(const ParameterState&);
};
const std::vector<Monitor>& monitored_quantities();

struct PosteriorSample {
  std::vector<ParameterState> states;      // merged thinned draws, chain-major
  std::vector<PredictiveDraw> predictive;  // aligned with states
  std::size_t kept_per_chain = 0;
  std::size_t n_chains = 0;
  std::size_t total_iters_per_chain = 0;
  bool converged = false;
  std::map<std::string, double> psrf;  // final gate values per monitored scalar
  MhStats mh_nu_h;                     // pooled across chains
  MhStats mh_nu_f;
};

// Full protocol: run n_chains chains, gate on split-chain PSRF over the final
// retention window, extend until converged or the iteration budget is
// exhausted, then thin and merge. On budget exhaustion the partial sample is
// returned with converged = false.
PosteriorSample run_until_converged(const EnsembleData& data, const ReanalysisData& rean,
                                    const PriorConfig& priors, const InadequacyConfig& inad,
                                    const ChainConfig& cfg);

}  // namespace coex::gibbs
