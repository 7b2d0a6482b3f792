#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "riskshare/planner.hpp"
#include "riskshare/scenario.hpp"

using namespace riskshare;

namespace {

Scenario entropic52() {
    return parse_scenario(bundled_scenario_text("entropic-5.2"), "entropic-5.2");
}

Scenario tiny2x2() { return parse_scenario(bundled_scenario_text("tiny-2x2"), "tiny-2x2"); }

std::vector<double> unit_hedge(const ProbSpace& space, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> z(space.atom_count());
    for (auto& v : z) v = uni(rng);
    double m = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) m += space.weight(j) * z[j];
    for (auto& v : z) v -= m;
    double m2 = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) m2 += space.weight(j) * z[j] * z[j];
    for (auto& v : z) v /= std::sqrt(m2);
    return z;
}

}  // namespace

TEST_CASE("decision vector invariants") {
    ProbSpace space(4);
    DecisionVector dec = DecisionVector::zero(3, 4);
    CHECK_NOTHROW(dec.validate(space));
    dec.beta1 = {1.0, 0.0, 0.0, 0.0};  // mean 0.25
    CHECK_THROWS_AS(dec.validate(space), std::invalid_argument);
    dec.beta1 = {3.0, -1.0, -1.0, -1.0};  // mean 0 but second moment 3
    CHECK_THROWS_AS(dec.validate(space), std::invalid_argument);
    dec.beta1 = {1.0, -1.0, 1.0, -1.0};
    CHECK_NOTHROW(dec.validate(space));
    dec.tbr.weights = {0.5, 1.2, 0.5};
    CHECK_THROWS_AS(dec.validate(space), std::invalid_argument);
}

TEST_CASE("assemble at the zero decision reproduces the no-trade risks") {
    const Scenario s = entropic52();
    DecisionVector dec = DecisionVector::zero(s.grid.cells(), s.space.atom_count());
    const Assembly a =
        assemble_objective(s.firm1, s.firm2, dec, s.space, s.grid, ScheduleMode::Shared);
    CHECK(a.firm[0].risk ==
          doctest::Approx(evaluate(s.firm1.risk, s.space, s.firm1.endowment)));
    CHECK(a.firm[1].risk ==
          doctest::Approx(evaluate(s.firm2.risk, s.space, s.firm2.endowment)));
    CHECK(a.firm[0].income == 0.0);
    CHECK(a.firm[1].income == 0.0);
    CHECK(a.aggregate == doctest::Approx(7.36).epsilon(0.02 / 7.36));
}

TEST_CASE("swapping identical firms and mirroring the rule leaves the aggregate fixed") {
    Scenario s = entropic52();
    s.firm2 = s.firm1;  // identical firms
    std::mt19937_64 rng(17);
    DecisionVector dec = DecisionVector::zero(s.grid.cells(), s.space.atom_count());
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (auto& a : dec.schedule1.alpha) a = uni(rng);
    dec.schedule1.tail_slope = 0.4;
    dec.schedule2 = dec.schedule1;
    dec.beta1 = unit_hedge(s.space, rng);
    dec.beta2 = unit_hedge(s.space, rng);
    for (auto& w : dec.tbr.weights) w = uni(rng);

    DecisionVector mirrored = dec;
    std::swap(mirrored.beta1, mirrored.beta2);
    for (auto& w : mirrored.tbr.weights) w = 1.0 - w;

    const Assembly a0 =
        assemble_objective(s.firm1, s.firm2, dec, s.space, s.grid, ScheduleMode::Shared);
    const Assembly a1 =
        assemble_objective(s.firm1, s.firm2, mirrored, s.space, s.grid, ScheduleMode::Shared);
    CHECK(a0.aggregate == doctest::Approx(a1.aggregate).epsilon(1e-12));
    CHECK(a0.firm[0].assessment == doctest::Approx(a1.firm[1].assessment).epsilon(1e-12));
}

TEST_CASE("feasibility repair") {
    ProbSpace space(14);
    std::mt19937_64 rng(9);
    std::vector<double> beta = unit_hedge(space, rng);
    for (auto& v : beta) v *= std::sqrt(1.2);  // second moment 1.2

    const auto violation = [&](const std::vector<double>& z) {
        double m2 = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j) m2 += space.weight(j) * z[j] * z[j];
        return m2 - 1.0;
    };
    std::vector<double> grad(14);
    for (std::size_t j = 0; j < 14; ++j) grad[j] = 2.0 * space.weight(j) * beta[j];
    const RepairResult rr = feasibility_repair(beta, grad, violation);
    REQUIRE(rr.ok);
    CHECK(violation(rr.point) <= 1e-12);

    // already feasible: unchanged
    const RepairResult same = feasibility_repair(rr.point, grad, violation);
    CHECK(same.ok);
    CHECK(same.point == rr.point);

    // random affine constraints: repaired point within 2x the projection distance
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int it = 0; it < 100; ++it) {
        std::vector<double> a(6), x(6);
        for (auto& v : a) v = uni(rng);
        for (auto& v : x) v = uni(rng);
        double dot = 0.0, nrm2 = 0.0;
        for (std::size_t j = 0; j < 6; ++j) {
            dot += a[j] * x[j];
            nrm2 += a[j] * a[j];
        }
        const double b = dot - std::abs(uni(rng)) - 0.1;  // violated by construction
        const auto viol = [&](const std::vector<double>& p) {
            double lhs = 0.0;
            for (std::size_t j = 0; j < 6; ++j) lhs += a[j] * p[j];
            return lhs - b;
        };
        const double v0 = viol(x);
        REQUIRE(v0 > 0.0);
        const RepairResult rep = feasibility_repair(x, a, viol);
        REQUIRE(rep.ok);
        double dist = 0.0;
        for (std::size_t j = 0; j < 6; ++j)
            dist += (rep.point[j] - x[j]) * (rep.point[j] - x[j]);
        const double minimal = v0 / std::sqrt(nrm2);  // projection distance
        CHECK(std::sqrt(dist) <= 2.0 * minimal + 1e-12);
    }
}

TEST_CASE("solve on the tiny instance: monotone trace, no-trade dominance, IR") {
    const Scenario s = tiny2x2();
    const PlannerResult res = solve(s.firm1, s.firm2, s.space, s.grid, s.solver);
    REQUIRE(res.trace.size() >= 2);
    CHECK(res.trace.front() ==
          doctest::Approx(res.initial_risk[0] + res.initial_risk[1]).epsilon(1e-12));
    for (std::size_t i = 1; i < res.trace.size(); ++i)
        CHECK(res.trace[i] <= res.trace[i - 1] + 1e-12);
    CHECK(res.aggregate <= res.initial_risk[0] + res.initial_risk[1] + 1e-9);
    CHECK(res.ir_satisfied[0]);
    CHECK(res.ir_satisfied[1]);
    CHECK(res.aggregate < res.trace.front() - 0.01);  // it actually trades
}

TEST_CASE("per-firm schedule mode solves and stays dominated by no trade") {
    Scenario s = tiny2x2();
    s.solver.mode = ScheduleMode::PerFirm;
    s.solver.max_iterations = 800;
    const PlannerResult res = solve(s.firm1, s.firm2, s.space, s.grid, s.solver);
    CHECK(res.aggregate <= res.initial_risk[0] + res.initial_risk[1] + 1e-9);
    for (std::size_t i = 1; i < res.trace.size(); ++i)
        CHECK(res.trace[i] <= res.trace[i - 1] + 1e-12);
}

TEST_CASE("entropic fixed point: damped oracle and degenerate branch") {
    const Scenario s = entropic52();
    const Claim z0 = entropic_fixed_point_solve(s.firm1, s.space, 0.0);
    CHECK(entropic_fixed_point_residual(s.firm1, s.space, 0.0, z0) < 1e-8);

    FirmSpec flat{Claim::constant(14, -2.0), RiskMeasureSpec::entropic(2.0)};
    const Claim zf = entropic_fixed_point_solve(flat, s.space, 0.0);
    for (double v : zf.payoffs) CHECK(v == 0.0);
    CHECK(entropic_fixed_point_residual(flat, s.space, 0.5, Claim::zeros(14)) == 0.0);

    CHECK_THROWS_AS(entropic_fixed_point_residual(
                        FirmSpec{Claim::zeros(14), RiskMeasureSpec::avar(0.1)}, s.space, 0.0,
                        Claim::zeros(14)),
                    std::invalid_argument);
}

TEST_CASE("optimal hedge beats random feasible hedges") {
    const Scenario s = entropic52();
    std::mt19937_64 rng(55);
    const Scenario av = parse_scenario(bundled_scenario_text("avar-5.3"), "avar-5.3");
    struct Case {
        const FirmSpec* firm;
        double a;
    };
    const Case cases[] = {{&s.firm1, 0.5}, {&s.firm2, 0.9}, {&av.firm1, 0.05}, {&av.firm2, 0.15}};
    for (const Case& c : cases) {
        const Claim z = optimal_hedge(c.firm->risk, s.space, c.firm->endowment, c.a);
        Claim pos = c.firm->endowment;
        for (std::size_t j = 0; j < 14; ++j) pos[j] -= c.a * z[j];
        const double best = evaluate(c.firm->risk, s.space, pos);
        for (int it = 0; it < 50; ++it) {
            const std::vector<double> rz = unit_hedge(s.space, rng);
            Claim p2 = c.firm->endowment;
            for (std::size_t j = 0; j < 14; ++j) p2[j] -= c.a * rz[j];
            CHECK(best <= evaluate(c.firm->risk, s.space, p2) + 1e-9);
        }
    }
}

TEST_CASE("fix-mix extraction") {
    const Scenario s = entropic52();
    PlannerResult fake;
    fake.decision.schedule1 = UtilitySchedule(std::vector<double>(6, 0.5), 0.3);
    fake.decision.tbr = TieBreakRule::constant(6, 0.37);
    const auto k = extract_fix_mix(fake, fake.decision.schedule1, s.grid);
    REQUIRE(k.has_value());
    CHECK(*k == doctest::Approx(0.37).epsilon(1e-14));

    fake.decision.schedule1 = UtilitySchedule::zero(6);
    CHECK(!extract_fix_mix(fake, fake.decision.schedule1, s.grid).has_value());
}

TEST_CASE("aggregator sufficiency under rule rearrangements") {
    // perturb f on three tie cells inside the null space of the two moment
    // rows (aggregator and income), so a_i and I_i are all preserved
    const Scenario s = entropic52();
    std::mt19937_64 rng(31);
    DecisionVector dec = DecisionVector::zero(6, 14);
    std::uniform_real_distribution<double> uni(0.2, 0.8);
    for (auto& a : dec.schedule1.alpha) a = uni(rng);
    dec.schedule1.tail_slope = 0.3;
    dec.schedule2 = dec.schedule1;
    dec.beta1 = unit_hedge(s.space, rng);
    dec.beta2 = unit_hedge(s.space, rng);
    dec.tbr = TieBreakRule::constant(6, 0.5);

    const auto vals = reconstruct_v(dec.schedule1, s.grid);
    double r0[3], r1[3];
    for (int j = 0; j < 3; ++j) {
        const double mu = s.grid.cell_weight(j);
        r0[j] = vals.slope[j] * mu;
        r1[j] = (s.grid.midpoint(j) * vals.v_prime[j] - vals.v[j]) * mu;
    }
    // cross product gives the null direction of the 2x3 system
    double d[3] = {r0[1] * r1[2] - r0[2] * r1[1], r0[2] * r1[0] - r0[0] * r1[2],
                   r0[0] * r1[1] - r0[1] * r1[0]};
    double dmax = std::max({std::abs(d[0]), std::abs(d[1]), std::abs(d[2])});
    REQUIRE(dmax > 0.0);
    DecisionVector moved = dec;
    for (int j = 0; j < 3; ++j) moved.tbr.weights[j] += 0.2 * d[j] / dmax;
    REQUIRE(moved.tbr.valid());

    const Assembly a0 =
        assemble_objective(s.firm1, s.firm2, dec, s.space, s.grid, ScheduleMode::Shared);
    const Assembly a1 =
        assemble_objective(s.firm1, s.firm2, moved, s.space, s.grid, ScheduleMode::Shared);
    for (int i = 0; i < 2; ++i) {
        CHECK(a0.firm[i].aggregator == doctest::Approx(a1.firm[i].aggregator).epsilon(1e-12));
        CHECK(a0.firm[i].assessment == doctest::Approx(a1.firm[i].assessment).epsilon(1e-10));
    }
}

TEST_CASE("transfer SEA") {
    const Scenario s = entropic52();
    const double rho1 = evaluate(s.firm1.risk, s.space, s.firm1.endowment);
    const double rho2 = evaluate(s.firm2.risk, s.space, s.firm2.endowment);

    PlannerResult zero_trade;
    zero_trade.firm[0].assessment = rho1;
    zero_trade.firm[1].assessment = rho2;
    zero_trade.aggregate = rho1 + rho2;
    const TransferSea t0 = transfer_sea(zero_trade, s.firm1, s.firm2, s.space);
    CHECK(t0.rent == doctest::Approx(0.0));
    REQUIRE(t0.t_star.has_value());
    CHECK(*t0.t_star == doctest::Approx(0.0).epsilon(1e-12));

    // the forced-interval example: A1 = rho1 + 0.3, A2 = rho2 - 0.5
    PlannerResult skew;
    skew.firm[0].assessment = rho1 + 0.3;
    skew.firm[1].assessment = rho2 - 0.5;
    skew.aggregate = skew.firm[0].assessment + skew.firm[1].assessment;
    const TransferSea ts = transfer_sea(skew, s.firm1, s.firm2, s.space);
    CHECK(ts.rent == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(ts.lower == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(ts.upper == doctest::Approx(0.5).epsilon(1e-12));
    REQUIRE(ts.t_star.has_value());
    CHECK(*ts.t_star == doctest::Approx(0.4).epsilon(1e-12));

    // slack IR leaves zero inside the feasible transfer interval
    const Scenario tiny = tiny2x2();
    const PlannerResult res = solve(tiny.firm1, tiny.firm2, tiny.space, tiny.grid, tiny.solver);
    const TransferSea tt = transfer_sea(res, tiny.firm1, tiny.firm2, tiny.space);
    CHECK(tt.lower <= 0.0);
    CHECK(tt.upper >= 0.0);
    CHECK(tt.upper - tt.lower == doctest::Approx(tt.rent).epsilon(1e-10));
}

TEST_CASE("collinearity check and fault injection") {
    const Scenario s = tiny2x2();

    // zero decision: nothing binds, the check is vacuous
    PlannerResult none;
    none.decision = DecisionVector::zero(s.grid.cells(), s.space.atom_count());
    const CollinearityReport vac = collinearity_check(none, s.space, s.grid, ScheduleMode::Shared);
    CHECK(vac.max_mean_residual == 0.0);
    CHECK(vac.max_variance_residual == 0.0);

    const PlannerResult res = solve(s.firm1, s.firm2, s.space, s.grid, s.solver);
    const CollinearityReport rep =
        collinearity_check(res, s.space, s.grid, ScheduleMode::Shared);
    CHECK(rep.max_mean_residual < 1e-10);
    REQUIRE(res.variance_binding[0]);
    REQUIRE(res.variance_binding[1]);
    CHECK(rep.max_variance_residual < 1e-6);

    // fault injection: a mean-preserving bump to Z breaks the variance match
    PlannerResult bad = res;
    bad.decision.beta1[0] += 0.05;
    bad.decision.beta1[1] -= 0.05;
    const CollinearityReport worse =
        collinearity_check(bad, s.space, s.grid, ScheduleMode::Shared);
    CHECK(worse.max_variance_residual > rep.max_variance_residual + 1e-6);
}
