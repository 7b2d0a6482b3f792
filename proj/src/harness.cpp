#include "riskshare/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "riskshare/svg.hpp"

namespace riskshare {

namespace {

std::string fmt(double v, int prec = 4) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

nlohmann::ordered_json to_json(const std::vector<double>& v) {
    return nlohmann::ordered_json(v);
}

void run_risk(const Scenario& s, RunOutput& out) {
    const PlannerResult res = solve(s.firm1, s.firm2, s.space, s.grid, s.solver);
    out.planner = res;

    const TransferSea ts = transfer_sea(res, s.firm1, s.firm2, s.space);
    const CollinearityReport col = collinearity_check(res, s.space, s.grid, s.solver.mode);

    nlohmann::ordered_json p;
    p["kind"] = "risk";
    p["atoms"] = s.space.atom_count();
    p["space_digest"] = space_digest(s.space);
    p["initial_risk"] = {res.initial_risk[0], res.initial_risk[1]};
    p["aggregate_initial"] = res.initial_risk[0] + res.initial_risk[1];
    p["final_risk"] = {res.firm[0].risk, res.firm[1].risk};
    p["income"] = {res.firm[0].income, res.firm[1].income};
    p["assessment"] = {res.firm[0].assessment, res.firm[1].assessment};
    p["aggregator"] = {res.firm[0].aggregator, res.firm[1].aggregator};
    p["aggregate"] = res.aggregate;
    if (res.fix_mix_ratio) p["fix_mix_K"] = *res.fix_mix_ratio;
    else p["fix_mix_K"] = nullptr;
    p["ir_satisfied"] = {res.ir_satisfied[0], res.ir_satisfied[1]};
    p["iterations"] = res.iterations;
    p["transfer"] = {{"rent", ts.rent},
                     {"lower", ts.lower},
                     {"upper", ts.upper},
                     {"t_star", ts.t_star ? nlohmann::ordered_json(*ts.t_star)
                                          : nlohmann::ordered_json(nullptr)}};
    p["collinearity"] = {{"mean_residual", col.max_mean_residual},
                         {"variance_residual", col.max_variance_residual}};
    p["variance_post_pass"] = res.variance_post_pass;

    const Assembly fin = assemble_objective(s.firm1, s.firm2, res.decision, s.space, s.grid,
                                            s.solver.mode);
    nlohmann::ordered_json endow = nlohmann::ordered_json::array();
    nlohmann::ordered_json pos = nlohmann::ordered_json::array();
    for (int i = 0; i < 2; ++i) {
        const Claim& w = i == 0 ? s.firm1.endowment : s.firm2.endowment;
        const std::vector<double>& beta = i == 0 ? res.decision.beta1 : res.decision.beta2;
        std::vector<double> after(w.size());
        for (std::size_t j = 0; j < w.size(); ++j)
            after[j] = w[j] - res.firm[i].aggregator * beta[j];
        endow.push_back(to_json(w.payoffs));
        pos.push_back(to_json(after));
    }
    p["endowment"] = endow;
    p["position"] = pos;
    p["indirect_utility"] = to_json(fin.values1.v);
    p["indirect_utility2"] = to_json(fin.values2.v);
    p["theta"] = [&] {
        std::vector<double> t(s.grid.cells());
        for (std::size_t k = 0; k < t.size(); ++k) t[k] = s.grid.midpoint(k);
        return to_json(t);
    }();
    if (s.firm1.risk.kind == RiskKind::Entropic && s.firm2.risk.kind == RiskKind::Entropic) {
        p["fixed_point_residual"] = {
            entropic_fixed_point_residual(s.firm1, s.space, res.firm[0].aggregator,
                                          Claim(res.decision.beta1)),
            entropic_fixed_point_residual(s.firm2, s.space, res.firm[1].aggregator,
                                          Claim(res.decision.beta2))};
    }
    p["decision"] = {{"alpha", to_json(res.decision.schedule1.alpha)},
                     {"tail", res.decision.schedule1.tail_slope},
                     {"alpha2", to_json(res.decision.schedule2.alpha)},
                     {"tail2", res.decision.schedule2.tail_slope},
                     {"beta1", to_json(res.decision.beta1)},
                     {"beta2", to_json(res.decision.beta2)},
                     {"tbr", to_json(res.decision.tbr.weights)}};
    p["trace"] = to_json(res.trace);
    out.record.payload = std::move(p);

    std::ostringstream os;
    os << "scenario " << s.name << " (risk, seed " << s.solver.seed << ")\n";
    os << "                    firm 1      firm 2      aggregate\n";
    os << "  initial risk   " << fmt(res.initial_risk[0], 4) << "      " << fmt(res.initial_risk[1], 4)
       << "      " << fmt(res.initial_risk[0] + res.initial_risk[1], 4) << "\n";
    os << "  final risk     " << fmt(res.firm[0].risk, 4) << "      " << fmt(res.firm[1].risk, 4) << "\n";
    os << "  income         " << fmt(res.firm[0].income, 4) << "     " << fmt(res.firm[1].income, 4) << "\n";
    os << "  assessment     " << fmt(res.firm[0].assessment, 4) << "      "
       << fmt(res.firm[1].assessment, 4) << "      " << fmt(res.aggregate, 4) << "\n";
    os << "  IR             " << (res.ir_satisfied[0] ? "yes" : "NO ") << "         "
       << (res.ir_satisfied[1] ? "yes" : "NO ") << "\n";
    if (res.fix_mix_ratio) os << "  fix-mix K = " << fmt(*res.fix_mix_ratio, 4) << "\n";
    os << "  rent = " << fmt(ts.rent, 4);
    if (ts.t_star)
        os << "   T* in [" << fmt(ts.lower, 4) << ", " << fmt(ts.upper, 4) << "], midpoint "
           << fmt(*ts.t_star, 4);
    os << "\n  sweeps " << res.iterations << "\n";
    out.summary = os.str();
}

void run_profit(const Scenario& s, RunOutput& out) {
    const CatalogueGameSpec& cg = s.catalogue;
    CatalogueGrid grid(s.space, s.grid, cg.basic1, cg.cost1, cg.basic2, cg.cost2, cg.hull_step,
                       cg.price_grid);
    PayoffTable table;
    const NashResult nash = mixed_nash(grid, cg.enumeration_cap, cg.nash, &table);
    out.nash = nash;
    out.table = table;

    double pay1 = 0.0, pay2 = 0.0;
    for (std::size_t r = 0; r < table.rows; ++r)
        for (std::size_t c = 0; c < table.cols; ++c) {
            const double pr = nash.profile1.probabilities[r] * nash.profile2.probabilities[c];
            pay1 += pr * table.p1(r, c);
            pay2 += pr * table.p2(r, c);
        }

    nlohmann::ordered_json p;
    p["kind"] = "profit";
    p["atoms"] = s.space.atom_count();
    p["space_digest"] = space_digest(s.space);
    p["rows"] = table.rows;
    p["cols"] = table.cols;
    p["eps"] = nash.eps;
    p["certified"] = nash.certified;
    p["iterations"] = nash.iterations;
    p["payoff"] = {pay1, pay2};
    p["profile1"] = to_json(nash.profile1.probabilities);
    p["profile2"] = to_json(nash.profile2.probabilities);
    out.record.payload = std::move(p);

    std::ostringstream os;
    os << "scenario " << s.name << " (profit)\n";
    os << "  strategy families: " << table.rows << " x " << table.cols << " catalogues\n";
    os << "  equilibrium payoffs: " << fmt(pay1, 5) << " / " << fmt(pay2, 5) << "\n";
    os << "  eps-certificate: " << fmt(nash.eps, 6) << (nash.certified ? "  (certified)" : "  (NOT certified)")
       << "\n";
    out.summary = os.str();
}

}  // namespace

std::string space_digest(const ProbSpace& space) {
    std::ostringstream os;
    os << space.atom_count();
    for (double w : space.weights()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g,", w);
        os << buf;
    }
    return fnv1a_digest(os.str());
}

RunOutput run_scenario(const Scenario& base, const RunOverrides& overrides) {
    RunOutput out;
    out.scenario = base;
    Scenario& s = out.scenario;
    if (overrides.seed) {
        s.solver.seed = *overrides.seed;
        s.catalogue.nash.seed = *overrides.seed;
    }
    if (overrides.max_iter) s.solver.max_iterations = *overrides.max_iter;
    if (overrides.freeze_tbr) {
        if (*overrides.freeze_tbr == 1) s.solver.tbr_policy = TbrPolicy::FrozenFirm1;
        else if (*overrides.freeze_tbr == 0) s.solver.tbr_policy = TbrPolicy::FrozenFirm2;
        else s.solver.tbr_policy = TbrPolicy::Free;
    }
    if (overrides.out_dir) s.out_dir = *overrides.out_dir;

    out.record.scenario_name = s.name;
    // overrides change the effective scenario; digest the canonical form,
    // and keep a digest of the input text as given
    out.record.scenario_digest = fnv1a_digest(serialize_scenario(s));
    out.record.input_digest = fnv1a_digest(base.raw_text);
    out.record.seed = s.game == GameKind::RiskMin ? s.solver.seed : s.catalogue.nash.seed;
    out.record.game = s.game == GameKind::RiskMin ? "risk" : "profit";

    const auto t0 = std::chrono::steady_clock::now();
    if (s.game == GameKind::RiskMin) run_risk(s, out);
    else run_profit(s, out);
    out.record.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

std::string write_artifacts(const std::string& dir, const RunOutput& out) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string record_path = dir + "/result.json";
    write_record(record_path, out.record);
    {
        // append-only history: one compact record per run
        std::ofstream log(dir + "/records.jsonl", std::ios::binary | std::ios::app);
        log << record_to_json(out.record).dump() << "\n";
    }

    if (out.planner) {
        const PlannerResult& res = *out.planner;
        {
            std::ofstream csv(dir + "/trace.csv", std::ios::binary);
            csv << "sweep,aggregate\n";
            for (std::size_t i = 0; i < res.trace.size(); ++i) {
                char buf[48];
                std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, res.trace[i]);
                csv << buf;
            }
        }
        const auto& p = out.record.payload;
        for (int i = 0; i < 2; ++i) {
            LinePlot plot;
            plot.title = "firm " + std::to_string(i + 1) + " position before/after trading";
            plot.x_label = "elementary event";
            plot.series.push_back({"endowment", p["endowment"][i].get<std::vector<double>>()});
            plot.series.push_back({"after trading", p["position"][i].get<std::vector<double>>()});
            write_svg(dir + "/claims_firm" + std::to_string(i + 1) + ".svg", plot);
        }
        {
            LinePlot plot;
            plot.title = "indirect utility";
            plot.x_label = "agent type";
            plot.x = p["theta"].get<std::vector<double>>();
            plot.series.push_back({"v firm 1", p["indirect_utility"].get<std::vector<double>>()});
            plot.series.push_back({"v firm 2", p["indirect_utility2"].get<std::vector<double>>()});
            write_svg(dir + "/indirect_utility.svg", plot);
        }
        {
            LinePlot plot;
            plot.title = "tie-break rule (firm 1 share)";
            plot.x_label = "agent type";
            plot.x = p["theta"].get<std::vector<double>>();
            plot.series.push_back({"f", res.decision.tbr.weights});
            plot.step = true;
            write_svg(dir + "/tbr.svg", plot);
        }
    }
    if (out.table) {
        std::ofstream csv(dir + "/payoff_table.csv", std::ios::binary);
        csv << "row,col,pi1,pi2\n";
        for (std::size_t r = 0; r < out.table->rows; ++r)
            for (std::size_t c = 0; c < out.table->cols; ++c) {
                char buf[96];
                std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g\n", r, c,
                              out.table->p1(r, c), out.table->p2(r, c));
                csv << buf;
            }
    }
    return record_path;
}

}  // namespace riskshare
