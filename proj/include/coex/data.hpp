// Input data containers and ingestion validation.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace coex {

struct ModelRuns {
  std::string model_id;
  std::vector<double> hist_runs;
  std::vector<double> fut_runs;
};

// Multi-model ensemble for one gridbox. Run counts may differ between models
// and between scenarios; fut_runs may be empty for internally constructed
// datasets (leave-one-out refits), which validate() reports as a violation
// for user-supplied input.
struct EnsembleData {
  std::vector<ModelRuns> models;

  std::size_t model_count() const { return models.size(); }
};

struct ReanalysisData {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool ok() const { return violations.empty(); }
};

ValidationReport validate(const EnsembleData& data, const ReanalysisData& rean);

}  // namespace coex
