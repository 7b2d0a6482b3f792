#pragma once

#include <optional>
#include <string>

#include "riskshare/catalogue.hpp"
#include "riskshare/planner.hpp"
#include "riskshare/record.hpp"
#include "riskshare/scenario.hpp"

namespace riskshare {

struct RunOverrides {
    std::optional<int> freeze_tbr;  // 1 -> firm 1 takes all ties, 0 -> firm 2, -1 -> free
    std::optional<unsigned long> seed;
    std::optional<std::size_t> max_iter;
    std::optional<std::string> out_dir;
};

struct RunOutput {
    Scenario scenario;
    ExperimentRecord record;
    std::string summary;
    // populated depending on the game kind:
    std::optional<PlannerResult> planner;
    std::optional<NashResult> nash;
    std::optional<PayoffTable> table;
};

/// Executes a scenario (risk-min solve or profit-max catalogue game) and
/// assembles the deterministic result record plus a printable summary.
RunOutput run_scenario(const Scenario& base, const RunOverrides& overrides);

/// Writes result.json, trace/payoff CSVs and the SVG plots under dir
/// (created if needed). Returns the record path.
std::string write_artifacts(const std::string& dir, const RunOutput& out);

std::string space_digest(const ProbSpace& space);

}  // namespace riskshare
