#include "coex/data.hpp"

#include <cmath>
#include <set>

namespace coex {

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

ValidationReport validate(const EnsembleData& data, const ReanalysisData& rean) {
  ValidationReport report;
  if (data.model_count() < 2) {
    report.violations.push_back("models: need at least 2 models, got " +
                                std::to_string(data.model_count()));
  }
  std::set<std::string> seen;
  for (const auto& model : data.models) {
    if (!seen.insert(model.model_id).second) {
      report.violations.push_back("model_id: duplicate \"" + model.model_id + "\"");
    }
    if (model.hist_runs.empty()) {
      report.violations.push_back("model " + model.model_id + ": hist_runs empty");
    }
    if (model.fut_runs.empty()) {
      report.violations.push_back("model " + model.model_id + ": fut_runs empty");
    }
    if (!all_finite(model.hist_runs)) {
      report.violations.push_back("model " + model.model_id + ": hist_runs contains non-finite value");
    }
    if (!all_finite(model.fut_runs)) {
      report.violations.push_back("model " + model.model_id + ": fut_runs contains non-finite value");
    }
  }
  if (rean.size() < 1) {
    report.violations.push_back("reanalysis: values empty, need N >= 1");
  } else if (rean.size() == 1) {
    report.warnings.push_back("reanalysis spread prior-dominated (N = 1)");
  }
  if (!all_finite(rean.values)) {
    report.violations.push_back("reanalysis: values contains non-finite value");
  }
  return report;
}

}  // namespace coex
