#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "riskshare/catalogue.hpp"
#include "riskshare/planner.hpp"
#include "riskshare/prob_space.hpp"

namespace riskshare {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class GameKind { RiskMin, ProfitMax };

struct CatalogueGameSpec {
    std::vector<Claim> basic1, basic2;
    std::vector<double> cost1, cost2;
    double hull_step = 1.0;
    std::vector<double> price_grid;
    std::size_t enumeration_cap = 4096;
    NashConfig nash;
};

/// A fully parsed experiment description. Exactly one of the two game
/// payloads is active, selected by `game`.
struct Scenario {
    std::string name;
    GameKind game = GameKind::RiskMin;
    ProbSpace space{2};
    TypeGrid grid{0.05, 1};
    // risk game
    FirmSpec firm1, firm2;
    PlannerConfig solver;
    // profit game
    CatalogueGameSpec catalogue;
    std::string out_dir;

    std::string raw_text;  // exact file content, input to the content digest
};

/// Parses the key-value scenario format. Errors carry the offending line
/// number and key.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<string>");
Scenario load_scenario_file(const std::string& path);

/// Canonical serialization; parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const Scenario& s);

/// Names of the scenarios compiled into the binary.
std::vector<std::string> bundled_scenario_names();
/// Scenario text by bundled name; throws ScenarioError for unknown names.
std::string bundled_scenario_text(const std::string& name);
/// Loads `spec` as a file path when one exists, else as a bundled name.
Scenario resolve_scenario(const std::string& spec);

}  // namespace riskshare
