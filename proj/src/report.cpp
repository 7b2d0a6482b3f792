#include "riskshare/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "riskshare/svg.hpp"

namespace riskshare {

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string cell(const ExperimentRecord& r, const char* key, int idx = -1) {
    if (r.game != "risk" || !r.payload.contains(key)) return "-";
    const auto& v = r.payload.at(key);
    if (idx >= 0) {
        if (!v.is_array() || v.size() <= static_cast<std::size_t>(idx)) return "-";
        return fmt(v[idx].get<double>());
    }
    if (v.is_null()) return "-";
    if (v.is_number()) return fmt(v.get<double>());
    return "-";
}

}  // namespace

std::vector<std::string> column_labels(const std::vector<ExperimentRecord>& records) {
    std::vector<std::string> labels;
    std::map<std::string, int> seen;
    for (const auto& r : records) {
        const int n = ++seen[r.scenario_name];
        labels.push_back(n == 1 ? r.scenario_name
                                : r.scenario_name + " (" + std::to_string(n) + ")");
    }
    return labels;
}

std::string comparison_table(const std::vector<ExperimentRecord>& records) {
    if (records.empty()) throw std::invalid_argument("report needs at least one record");
    std::ostringstream os;

    std::set<std::string> spaces;
    for (const auto& r : records)
        if (r.payload.contains("space_digest"))
            spaces.insert(r.payload.at("space_digest").get<std::string>());
    const bool mixed_spaces = spaces.size() > 1;
    if (mixed_spaces)
        os << "> WARNING: records come from different probability spaces; "
              "figures are not comparable across columns.\n\n";

    os << "| metric |";
    for (const std::string& label : column_labels(records)) os << " " << label << " |";
    os << "\n|---|";
    for (std::size_t i = 0; i < records.size(); ++i) os << "---|";
    os << "\n";

    const auto row = [&](const std::string& label, auto getter) {
        os << "| " << label << " |";
        for (const auto& r : records) os << " " << getter(r) << " |";
        os << "\n";
    };
    row("initial risk firm 1", [](const auto& r) { return cell(r, "initial_risk", 0); });
    row("initial risk firm 2", [](const auto& r) { return cell(r, "initial_risk", 1); });
    row("initial aggregate", [](const auto& r) { return cell(r, "aggregate_initial"); });
    row("final risk firm 1", [](const auto& r) { return cell(r, "final_risk", 0); });
    row("final risk firm 2", [](const auto& r) { return cell(r, "final_risk", 1); });
    row("final assessment firm 1", [](const auto& r) { return cell(r, "assessment", 0); });
    row("final assessment firm 2", [](const auto& r) { return cell(r, "assessment", 1); });
    row("final aggregate", [](const auto& r) { return cell(r, "aggregate"); });
    row("fix-mix K", [](const auto& r) { return cell(r, "fix_mix_K"); });
    row("rent", [](const auto& r) {
        if (r.game != "risk" || !r.payload.contains("transfer")) return std::string("-");
        return fmt(r.payload.at("transfer").at("rent").template get<double>());
    });
    row("IR firm 1", [](const auto& r) {
        if (r.game != "risk") return std::string("-");
        return std::string(r.payload.at("ir_satisfied")[0].template get<bool>() ? "yes" : "no");
    });
    row("IR firm 2", [](const auto& r) {
        if (r.game != "risk") return std::string("-");
        return std::string(r.payload.at("ir_satisfied")[1].template get<bool>() ? "yes" : "no");
    });
    row("nash eps", [](const auto& r) {
        if (r.game != "profit") return std::string("-");
        return fmt(r.payload.at("eps").template get<double>());
    });
    return os.str();
}

void write_report(const std::string& dir, const std::vector<ExperimentRecord>& records) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ofstream md(dir + "/report.md", std::ios::binary);
    if (!md) throw std::runtime_error("cannot write report to " + dir);
    md << "# Run comparison\n\n" << comparison_table(records) << "\n";

    const std::vector<std::string> labels = column_labels(records);
    for (std::size_t ri = 0; ri < records.size(); ++ri) {
        const auto& r = records[ri];
        if (r.game != "risk" || !r.payload.contains("endowment")) continue;
        for (int i = 0; i < 2; ++i) {
            LinePlot plot;
            plot.title = labels[ri] + ": firm " + std::to_string(i + 1) + " claims";
            plot.x_label = "elementary event";
            plot.series.push_back(
                {"endowment", r.payload.at("endowment")[i].get<std::vector<double>>()});
            plot.series.push_back(
                {"after trading", r.payload.at("position")[i].get<std::vector<double>>()});
            const std::string path = dir + "/claims_" + std::to_string(ri + 1) + "_" +
                                     r.scenario_name + "_firm" + std::to_string(i + 1) + ".svg";
            write_svg(path, plot);
            md << "![](" << fs::path(path).filename().string() << ")\n";
        }
    }
}

}  // namespace riskshare
