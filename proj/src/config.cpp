#include "coex/config.hpp"

#include <cmath>

namespace coex {

namespace {

void require_positive(std::vector<std::string>& out, double v, const char* name) {
  if (!(std::isfinite(v) && v > 0.0)) {
    out.push_back(std::string(name) + " must be strictly positive");
  }
}

}  // namespace

std::vector<std::string> PriorConfig::violations() const {
  std::vector<std::string> out;
  require_positive(out, b_mu_h, "b_mu_h");
  require_positive(out, b_mu_f, "b_mu_f");
  require_positive(out, b_beta, "b_beta");
  require_positive(out, a_tau_h, "a_tau_h");
  require_positive(out, b_tau_h, "b_tau_h");
  require_positive(out, a_tau_f, "a_tau_f");
  require_positive(out, b_tau_f, "b_tau_f");
  require_positive(out, a_psi2, "a_psi2");
  require_positive(out, b_psi2, "b_psi2");
  require_positive(out, a_theta2, "a_theta2");
  require_positive(out, b_theta2, "b_theta2");
  require_positive(out, a_nu_h, "a_nu_h");
  require_positive(out, b_nu_h, "b_nu_h");
  require_positive(out, a_nu_f, "a_nu_f");
  require_positive(out, b_nu_f, "b_nu_f");
  require_positive(out, a_tau_w, "a_tau_w");
  require_positive(out, b_tau_w, "b_tau_w");
  if (!std::isfinite(a_mu_h)) out.push_back("a_mu_h must be finite");
  if (!std::isfinite(a_beta)) out.push_back("a_beta must be finite");
  return out;
}

std::vector<std::string> InadequacyConfig::violations() const {
  std::vector<std::string> out;
  if (!(std::isfinite(kappa) && kappa >= 1.0)) out.push_back("kappa must be >= 1");
  if (!(std::isfinite(kappa_w) && kappa_w >= 1.0)) out.push_back("kappa_w must be >= 1");
  return out;
}

std::vector<std::string> ChainConfig::violations() const {
  std::vector<std::string> out;
  if (n_chains < 1) out.push_back("n_chains must be >= 1");
  if (burn_in >= iters_initial) out.push_back("burn_in must be < iters_initial");
  if (thin < 1) out.push_back("thin must be >= 1");
  if (thin > iters_initial - burn_in) {
    out.push_back("thin must not exceed the retention window (iters_initial - burn_in)");
  }
  if (!(psrf_threshold > 1.0)) out.push_back("psrf_threshold must be > 1");
  if (!(lambda_h > 0.0)) out.push_back("lambda_h must be > 0");
  if (!(lambda_f > 0.0)) out.push_back("lambda_f must be > 0");
  if (extend_by < 1) out.push_back("extend_by must be >= 1");
  return out;
}

}  // namespace coex
