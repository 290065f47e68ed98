// Gridded CSV ingestion and report emission.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coex/config.hpp"
#include "coex/data.hpp"

namespace coex::cli {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridboxDataset {
  std::string gridbox_id;
  EnsembleData ensemble;
  ReanalysisData reanalysis;
};

// Ensemble CSV schema: gridbox_id,model_id,scenario,run_id,value with
// scenario in {hist, fut}. Rows are grouped by (gridbox, model, scenario),
// run values ordered by run_id; models keep first-appearance order.
// Malformed rows raise ParseError naming the line number.
std::map<std::string, EnsembleData> load_ensemble_csv(
    const std::string& path, const std::optional<std::vector<std::string>>& model_subset = {});

// Reanalysis CSV schema: gridbox_id,reanalysis_id,value. Duplicate
// (gridbox_id, reanalysis_id) pairs raise ParseError.
std::map<std::string, ReanalysisData> load_reanalysis_csv(const std::string& path);

// Join the two maps into per-gridbox datasets (sorted by gridbox_id).
// Gridboxes missing from either file get an empty counterpart so that
// validation reports them rather than dropping them silently.
std::vector<GridboxDataset> join_gridboxes(const std::map<std::string, EnsembleData>& ensembles,
                                           const std::map<std::string, ReanalysisData>& reanalyses);

void write_ensemble_csv(const std::string& path,
                        const std::vector<GridboxDataset>& gridboxes);
void write_reanalysis_csv(const std::string& path,
                          const std::vector<GridboxDataset>& gridboxes);

// JSON run configuration; unset keys fall back to defaults (nu prior rates
// default to 1/M per gridbox).
struct RunConfig {
  InadequacyConfig inad;
  ChainConfig chains;
  std::uint64_t seed = 0;
  std::optional<std::vector<std::string>> model_subset;
  std::map<std::string, double> prior_overrides;

  PriorConfig resolve_priors(std::size_t model_count) const;
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text);

// Deterministic decimal formatting used by every report writer.
std::string format_double(double v);

}  // namespace coex::cli
