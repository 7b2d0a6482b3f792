#pragma once

#include <string>
#include <vector>

#include "riskshare/record.hpp"

namespace riskshare {

/// Side-by-side comparison of runs (initial vs final risks, aggregate,
/// fix-mix ratio, transfer). Records from different probability spaces get a
/// warning banner and no cross-aggregation row.
std::string comparison_table(const std::vector<ExperimentRecord>& records);

/// Writes report.md plus claim-profile SVGs for each risk-game record.
void write_report(const std::string& dir, const std::vector<ExperimentRecord>& records);

}  // namespace riskshare
