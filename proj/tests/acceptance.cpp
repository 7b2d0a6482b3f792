// Acceptance suite: every criterion prints one PASS/FAIL line; the exit
// status is nonzero when any of them fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "riskshare/catalogue.hpp"
#include "riskshare/harness.hpp"
#include "riskshare/oracles.hpp"
#include "riskshare/planner.hpp"
#include "riskshare/scenario.hpp"

using namespace riskshare;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double wall(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

// criterion 1: entropic initial risks on the uniform 14-atom space
static void criterion1(const Scenario& s52) {
    const auto t0 = std::chrono::steady_clock::now();
    const double r1 = evaluate(s52.firm1.risk, s52.space, s52.firm1.endowment);
    const double r2 = evaluate(s52.firm2.risk, s52.space, s52.firm2.endowment);
    const double agg = r1 + r2;
    const double ms = wall(t0) * 1e3;
    const bool pass = std::abs(r1 - 3.53) <= 0.01 && std::abs(r2 - 3.84) <= 0.01 &&
                      std::abs(agg - 7.36) <= 0.02;
    report(1, pass,
           fmt("entropic initial risks %.4f / %.4f, aggregate %.4f "
               "(targets 3.53+-0.01, 3.84+-0.01, 7.36+-0.02; %.2f ms)",
               r1, r2, agg, ms));
}

int main() {
    const Scenario s52 = parse_scenario(bundled_scenario_text("entropic-5.2"), "entropic-5.2");
    criterion1(s52);

    // criterion 2: monopoly runs with the rule frozen to each firm
    PlannerResult mono1, mono2;
    {
        const auto t0 = std::chrono::steady_clock::now();
        PlannerConfig c = s52.solver;
        c.tbr_policy = TbrPolicy::FrozenFirm1;
        mono1 = solve(s52.firm1, s52.firm2, s52.space, s52.grid, c);
        const double t1 = wall(t0);
        const auto t2 = std::chrono::steady_clock::now();
        c.tbr_policy = TbrPolicy::FrozenFirm2;
        mono2 = solve(s52.firm1, s52.firm2, s52.space, s52.grid, c);
        const double t3 = wall(t2);
        const bool pass = mono1.firm[0].risk <= 2.25 && mono1.aggregate <= 6.10 &&
                          mono2.firm[1].risk <= 2.40 && mono2.aggregate <= 5.85 &&
                          t1 <= 60.0 && t3 <= 60.0;
        report(2, pass,
               fmt("monopoly-1 risk %.4f (<=2.25) aggregate %.4f (<=6.10); "
                   "monopoly-2 risk %.4f (<=2.40) aggregate %.4f (<=5.85); %.1f/%.1f s",
                   mono1.firm[0].risk, mono1.aggregate, mono2.firm[1].risk, mono2.aggregate,
                   t1, t3));
    }

    // criterion 3: duopoly strictly improves on both monopolies
    PlannerResult duo;
    {
        const auto t0 = std::chrono::steady_clock::now();
        duo = solve(s52.firm1, s52.firm2, s52.space, s52.grid, s52.solver);
        const double dt = wall(t0);
        const bool pass = duo.aggregate <= 5.55 && duo.aggregate < mono1.aggregate &&
                          duo.aggregate < mono2.aggregate && dt <= 60.0;
        report(3, pass,
               fmt("duopoly aggregate %.4f (<=5.55, mono-1 %.4f, mono-2 %.4f; %.1f s)",
                   duo.aggregate, mono1.aggregate, mono2.aggregate, dt));
    }

    // criterion 4: fix-mix ratio and aggregator sufficiency
    {
        bool pass = duo.fix_mix_ratio.has_value();
        double k = 0.0, diff = 1e300;
        if (pass) {
            k = *duo.fix_mix_ratio;
            pass = k >= 0.34 && k <= 0.50;
            DecisionVector constant = duo.decision;
            constant.tbr = TieBreakRule::constant(s52.grid.cells(), k);
            const Assembly a0 = assemble_objective(s52.firm1, s52.firm2, duo.decision,
                                                   s52.space, s52.grid, ScheduleMode::Shared);
            const Assembly a1 = assemble_objective(s52.firm1, s52.firm2, constant, s52.space,
                                                   s52.grid, ScheduleMode::Shared);
            diff = std::abs(a0.aggregate - a1.aggregate);
            pass = pass && diff < 1e-6;
        }
        report(4, pass,
               fmt("fix-mix K = %.4f (target [0.34, 0.50]); constant-K aggregate shift %.2e "
                   "(< 1e-6)",
                   k, diff));
    }

    // criterion 5: AV@R run
    {
        const Scenario av = parse_scenario(bundled_scenario_text("avar-5.3"), "avar-5.3");
        const double init = evaluate(av.firm1.risk, av.space, av.firm1.endowment) +
                            evaluate(av.firm2.risk, av.space, av.firm2.endowment);
        const auto t0 = std::chrono::steady_clock::now();
        const PlannerResult res = solve(av.firm1, av.firm2, av.space, av.grid, av.solver);
        const double dt = wall(t0);
        const bool pass =
            std::abs(init - 0.68) <= 0.01 && res.aggregate <= 0.30 && dt <= 60.0;
        report(5, pass,
               fmt("AV@R initial aggregate %.4f (0.68+-0.01), final %.4f (<=0.30; %.1f s)",
                   init, res.aggregate, dt));
    }

    // criterion 6: property suites
    {
        std::mt19937_64 rng(161803);
        std::uniform_real_distribution<double> uni(-2.0, 2.0);
        bool pass = true;
        std::string why;

        // 500 random claims per measure through the axiom battery
        std::vector<Claim> claims;
        for (int i = 0; i < 500; ++i) {
            Claim c = Claim::zeros(14);
            for (auto& v : c.payoffs) v = uni(rng);
            claims.push_back(std::move(c));
        }
        const AxiomReport ent = axiom_battery(RiskMeasureSpec::entropic(2.0), s52.space, claims);
        const AxiomReport ava = axiom_battery(RiskMeasureSpec::avar(0.3), s52.space, claims);
        if (!ent.passed() || !ava.passed()) {
            pass = false;
            why += " axiom-battery";
        }

        // subgradients vs central differences, relative error < 1e-5
        double fd_worst = 0.0;
        for (int it = 0; it < 12; ++it) {
            Claim x = Claim::zeros(14);
            bool tied = true;
            while (tied) {
                for (auto& v : x.payoffs) v = uni(rng);
                tied = false;
                for (std::size_t i = 0; i < 14 && !tied; ++i)
                    for (std::size_t j = i + 1; j < 14; ++j)
                        if (std::abs(x[i] - x[j]) < 1e-3) { tied = true; break; }
            }
            for (const RiskMeasureSpec& spec :
                 {RiskMeasureSpec::entropic(2.0), RiskMeasureSpec::avar(0.35)}) {
                const Claim g = subgradient(spec, s52.space, x);
                double gmax = 1e-12;
                for (std::size_t j = 0; j < 14; ++j) gmax = std::max(gmax, std::abs(g[j]));
                for (std::size_t j = 0; j < 14; ++j) {
                    Claim up = x, dn = x;
                    up[j] += 1e-6;
                    dn[j] -= 1e-6;
                    const double fd = (evaluate(spec, s52.space, up) -
                                       evaluate(spec, s52.space, dn)) / 2e-6;
                    fd_worst = std::max(fd_worst, std::abs(fd - g[j]) / gmax);
                }
            }
        }
        if (fd_worst >= 1e-5) {
            pass = false;
            why += " fd-gradients";
        }

        // 1000 random decision vectors: reconstructed v is convex,
        // nonincreasing, nonnegative with v(1) = 0
        std::uniform_real_distribution<double> pos(0.0, 3.0);
        for (int it = 0; it < 1000 && pass; ++it) {
            UtilitySchedule sch;
            sch.alpha.resize(6);
            for (auto& a : sch.alpha) a = pos(rng);
            sch.tail_slope = 0.5 * pos(rng);
            const auto vals = reconstruct_v(sch, s52.grid);
            const double h = s52.grid.cell_width();
            // v at the right endpoint is pinned at zero: the last midpoint
            // value is exactly the half-cell integral of slope^2
            if (std::abs(vals.v[5] - vals.slope[5] * vals.slope[5] * h / 2.0) > 1e-12)
                pass = false;
            for (std::size_t k = 0; k < 6 && pass; ++k) {
                if (vals.v[k] < 0.0 || vals.v_prime[k] > 0.0) pass = false;
                if (k + 1 < 6 && vals.v[k] < vals.v[k + 1] - 1e-12) pass = false;
                if (k > 0 && k + 1 < 6 &&
                    vals.v[k - 1] - 2.0 * vals.v[k] + vals.v[k + 1] < -1e-10)
                    pass = false;
            }
            if (!pass) why += " v-shape";
        }

        // envelope residual < 1e-9 for contracts built from the identity
        {
            UtilitySchedule sch;
            sch.alpha = {0.3, 1.2, 0.1, 0.8, 0.5, 0.2};
            sch.tail_slope = 0.4;
            const auto vals = reconstruct_v(sch, s52.grid);
            Claim z = Claim::zeros(14);
            for (auto& v : z.payoffs) v = uni(rng);
            const double m = mean(s52.space, z);
            for (auto& v : z.payoffs) v -= m;
            const double sd = std::sqrt(variance(s52.space, z));
            for (auto& v : z.payoffs) v /= sd;
            std::vector<Claim> contracts;
            for (std::size_t k = 0; k < 6; ++k) {
                Claim c = Claim::zeros(14);
                for (std::size_t j = 0; j < 14; ++j) c[j] = vals.slope[k] * z[j];
                contracts.push_back(std::move(c));
            }
            if (envelope_check(sch, s52.grid, s52.space, contracts).max_residual >= 1e-9) {
                pass = false;
                why += " envelope";
            }
        }

        // 50 random catalogue games: efficient aggregate equals the
        // pointwise-max integral and dominates 100 random rules
        std::uniform_real_distribution<double> uni01(0.0, 1.0);
        for (int game = 0; game < 50 && pass; ++game) {
            ProbSpace space(4);
            TypeGrid grid(0.05, 5);
            auto rnd_claim = [&] {
                Claim c = Claim::zeros(4);
                for (auto& v : c.payoffs) v = 0.6 * uni(rng);
                return c;
            };
            const CatalogueGrid g(space, grid, {rnd_claim(), rnd_claim()},
                                  {0.02 * uni01(rng), 0.02 * uni01(rng)},
                                  {rnd_claim(), rnd_claim()},
                                  {0.02 * uni01(rng), 0.02 * uni01(rng)}, 0.5,
                                  {0.0, 0.03, 0.06, 0.09});
            std::uniform_int_distribution<std::size_t> pick_p(0, g.products(0).size() - 1);
            std::uniform_int_distribution<std::size_t> pick_q(0, 3);
            auto rnd_cat = [&](int firm) {
                (void)firm;
                Catalogue c = Catalogue::null_only();
                c.contracts.push_back({pick_p(rng), g.price_grid()[pick_q(rng)]});
                c.contracts.push_back({pick_p(rng), g.price_grid()[pick_q(rng)]});
                return c;
            };
            const Catalogue c1 = rnd_cat(0), c2 = rnd_cat(1);
            const PayoffPair eff = payoff(g, c1, c2, TbrMode::Efficient);
            double maxint = 0.0;
            for (std::size_t k = 0; k < grid.cells(); ++k) {
                const TypeOutcome t = per_type_profit(g, grid.midpoint(k), c1, c2);
                maxint += std::max(t.pi1, t.pi2) * grid.cell_weight(k);
            }
            if (std::abs(eff.aggregate() - maxint) > 1e-9) {
                pass = false;
                why += " efficient-identity";
                break;
            }
            for (int jt = 0; jt < 100; ++jt) {
                TieBreakRule f = TieBreakRule::constant(5, 0.0);
                for (auto& wgt : f.weights) wgt = uni01(rng);
                if (payoff(g, c1, c2, TbrMode::Fixed, &f).aggregate() >
                    eff.aggregate() + 1e-9) {
                    pass = false;
                    why += " efficient-dominance";
                    break;
                }
            }
        }
        report(6, pass,
               fmt("property suites: axioms on 500 claims x 2 measures, fd %.2e, 1000 "
                   "schedules, envelope, 50 catalogue games%s",
                   fd_worst, pass ? "" : (" FAILED:" + why).c_str()));
    }

    // criterion 7: oracle equivalence
    {
        const Scenario tiny = parse_scenario(bundled_scenario_text("tiny-2x2"), "tiny-2x2");
        const PlannerResult res = solve(tiny.firm1, tiny.firm2, tiny.space, tiny.grid,
                                        tiny.solver);
        const BruteForceResult bf = tiny_brute_force_search(tiny, 21, 2.0, Exec::Parallel);
        const double gap = std::abs(bf.best - res.aggregate) / std::abs(res.aggregate);
        bool pass = gap <= 0.02 && bf.interior;

        std::mt19937_64 rng(424242);
        std::uniform_real_distribution<double> uni01(0.0, 1.0);
        double worst_eps = 0.0;
        bool pure_ok = true;
        for (int it = 0; it < 20; ++it) {
            PayoffTable t;
            t.rows = t.cols = 3;
            t.pi1.resize(9);
            t.pi2.resize(9);
            for (auto& v : t.pi1) v = uni01(rng);
            for (auto& v : t.pi2) v = uni01(rng);
            const NashResult got = fictitious_play(t, 100000, 0.01);
            worst_eps = std::max(worst_eps, got.eps);
            const auto eqs = support_enumeration(t);
            bool has_pure = false;
            for (const auto& e : eqs) has_pure |= e.pure;
            if (!has_pure) continue;
            bool matched = false;
            for (const auto& e : eqs) {
                if (!e.pure) continue;
                bool same = true;
                for (std::size_t r = 0; r < 3; ++r)
                    if (std::abs(e.x[r] - got.profile1.probabilities[r]) > 1e-9) same = false;
                for (std::size_t c = 0; c < 3; ++c)
                    if (std::abs(e.y[c] - got.profile2.probabilities[c]) > 1e-9) same = false;
                if (same) matched = true;
            }
            pure_ok = pure_ok && matched && got.eps < 1e-9;
        }
        pass = pass && worst_eps <= 0.01 && pure_ok;
        report(7, pass,
               fmt("brute-force gap %.4f (<=0.02, grid best %.5f vs solver %.5f); nash eps "
                   "%.4f (<=0.01), pure matches %s",
                   gap, bf.best, res.aggregate, worst_eps, pure_ok ? "yes" : "NO"));
    }

    // criterion 8: stationarity residual at the converged duopoly solution
    {
        const double r1 = entropic_fixed_point_residual(
            s52.firm1, s52.space, duo.firm[0].aggregator, Claim(duo.decision.beta1));
        const double r2 = entropic_fixed_point_residual(
            s52.firm2, s52.space, duo.firm[1].aggregator, Claim(duo.decision.beta2));
        const bool pass = r1 <= 0.05 && r2 <= 0.05;
        report(8, pass, fmt("fixed-point residuals %.2e / %.2e (<= 0.05)", r1, r2));
    }

    // criterion 9: byte-identical records for every bundled scenario
    {
        bool pass = true;
        for (const std::string& name : bundled_scenario_names()) {
            const Scenario s = parse_scenario(bundled_scenario_text(name), name);
            RunOverrides ov;
            const RunOutput a = run_scenario(s, ov);
            const RunOutput b = run_scenario(s, ov);
            if (record_text(a.record) != record_text(b.record)) pass = false;
        }
        report(9, pass, "determinism: repeated runs give byte-identical result records");
    }

    std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
