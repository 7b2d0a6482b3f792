#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "riskshare/harness.hpp"
#include "riskshare/oracles.hpp"
#include "riskshare/report.hpp"
#include "riskshare/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSolver = 2;
constexpr int kExitOracle = 3;

int cmd_run(const std::string& scenario_spec, const std::string& freeze,
            long long seed, long long max_iter, const std::string& out_dir,
            const std::string& game) {
    riskshare::Scenario s;
    try {
        s = riskshare::resolve_scenario(scenario_spec);
    } catch (const riskshare::ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (!game.empty()) {
        const bool want_risk = game == "risk";
        if (want_risk != (s.game == riskshare::GameKind::RiskMin)) {
            std::cerr << "scenario '" << s.name << "' is a "
                      << (s.game == riskshare::GameKind::RiskMin ? "risk" : "profit")
                      << " game, but --game=" << game << " was requested\n";
            return kExitUsage;
        }
    }
    riskshare::RunOverrides ov;
    if (freeze == "1") ov.freeze_tbr = 1;
    else if (freeze == "0") ov.freeze_tbr = 0;
    else if (freeze == "none") ov.freeze_tbr = -1;
    else if (!freeze.empty()) {
        std::cerr << "--freeze-tbr must be 0, 1 or none\n";
        return kExitUsage;
    }
    if (seed >= 0) ov.seed = static_cast<unsigned long>(seed);
    if (max_iter >= 0) ov.max_iter = static_cast<std::size_t>(max_iter);

    try {
        const riskshare::RunOutput out = riskshare::run_scenario(s, ov);
        std::string dir = !out_dir.empty() ? out_dir
                          : !s.out_dir.empty() ? s.out_dir
                                               : "out/" + s.name;
        const std::string record_path = riskshare::write_artifacts(dir, out);
        std::cout << out.summary;
        std::printf("  wall time %.2f s\n  record: %s\n", out.record.wall_time_s,
                    record_path.c_str());
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    }
}

int cmd_oracle(const std::string& suite) {
    std::vector<std::string> suites;
    if (suite == "all") suites = riskshare::oracle_suite_names();
    else suites.push_back(suite);
    bool all_ok = true;
    try {
        for (const std::string& name : suites) {
            const riskshare::OracleReport rep = riskshare::run_oracle(name);
            std::printf("[%s] %s\n", rep.passed ? "PASS" : "FAIL", rep.suite.c_str());
            for (const std::string& line : rep.lines) std::printf("    %s\n", line.c_str());
            all_ok = all_ok && rep.passed;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }
    return all_ok ? kExitOk : kExitOracle;
}

int cmd_report(const std::vector<std::string>& paths, const std::string& out_dir) {
    try {
        std::vector<riskshare::ExperimentRecord> records;
        for (const std::string& p : paths) records.push_back(riskshare::read_record(p));
        riskshare::write_report(out_dir, records);
        std::cout << riskshare::comparison_table(records);
        std::cout << "report written to " << out_dir << "/report.md\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "report error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"risk-sharing and catalogue-game solver"};
    app.require_subcommand(1);

    std::string scenario_spec, freeze, out_dir, game;
    long long seed = -1, max_iter = -1;
    auto* run = app.add_subcommand("run", "run a scenario (file path or bundled name)");
    run->add_option("scenario", scenario_spec, "scenario file or bundled name")->required();
    run->add_option("--freeze-tbr", freeze, "freeze the tie-break rule: 0, 1 or none");
    run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--max-iter", max_iter, "override the iteration budget");
    run->add_option("--out-dir", out_dir, "artifact directory (default out/<name>)");
    run->add_option("--game", game, "assert the scenario's game kind: risk or profit");

    std::string suite;
    auto* oracle = app.add_subcommand("oracle", "run an independent-oracle suite");
    oracle->add_option("suite", suite, "suite name or 'all'")->required();

    std::vector<std::string> record_paths;
    std::string report_dir = "out/report";
    auto* report = app.add_subcommand("report", "compare result records side by side");
    report->add_option("records", record_paths, "result.json paths")->required();
    report->add_option("--out-dir", report_dir, "report directory");

    auto* list = app.add_subcommand("list-scenarios", "list bundled scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    if (run->parsed()) return cmd_run(scenario_spec, freeze, seed, max_iter, out_dir, game);
    if (oracle->parsed()) return cmd_oracle(suite);
    if (report->parsed()) return cmd_report(record_paths, report_dir);
    if (list->parsed()) {
        for (const std::string& name : riskshare::bundled_scenario_names())
            std::cout << name << "\n";
        return kExitOk;
    }
    return kExitUsage;
}
