// Per-gridbox batch inference with a bounded worker pool.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coex/csv_io.hpp"
#include "coex/diagnostics.hpp"

namespace coex::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitConvergence = 3;
inline constexpr int kExitIo = 4;

struct SummaryRow {
  std::string gridbox_id;
  std::string quantity;
  diagnostics::Summary summary;
  double psrf = 0.0;
  std::string status;
};

struct AcceptanceRow {
  std::string gridbox_id;
  double nu_h_accept = 0.0;
  double nu_f_accept = 0.0;
  std::size_t total_iters = 0;
};

struct RunResult {
  std::vector<SummaryRow> rows;        // sorted by gridbox_id then quantity
  std::vector<AcceptanceRow> accepts;  // sorted by gridbox_id
  int exit_code = kExitOk;
};

// Runs the full protocol on every gridbox. Gridboxes are independent jobs
// with seeds derived from (base seed, gridbox_id), so results do not depend
// on worker count or completion order. Per-gridbox failures are isolated and
// reported through the status column and the exit code.
RunResult run_gridboxes(const std::vector<GridboxDataset>& gridboxes, const RunConfig& config,
                        unsigned parallelism);

std::string summary_csv(const RunResult& result);
std::string acceptance_csv(const RunResult& result);

std::uint64_t gridbox_seed(std::uint64_t base_seed, const std::string& gridbox_id);

}  // namespace coex::cli
