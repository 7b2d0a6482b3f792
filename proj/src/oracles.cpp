#include "riskshare/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

namespace riskshare {

namespace {

std::string fmtline(const char* fmt, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, fmt, a, b);
    return buf;
}

/// Plain Gaussian elimination for the tiny square systems the oracles need.
bool gauss_solve(std::vector<double> M, std::vector<double> rhs, std::size_t n,
                 std::vector<double>& out) {
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t r = k + 1; r < n; ++r)
            if (std::abs(M[r * n + k]) > std::abs(M[piv * n + k])) piv = r;
        if (std::abs(M[piv * n + k]) < 1e-12) return false;
        if (piv != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(M[k * n + c], M[piv * n + c]);
            std::swap(rhs[k], rhs[piv]);
        }
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = M[r * n + k] / M[k * n + k];
            for (std::size_t c = k; c < n; ++c) M[r * n + c] -= f * M[k * n + c];
            rhs[r] -= f * rhs[k];
        }
    }
    out.assign(n, 0.0);
    for (std::size_t kk = n; kk-- > 0;) {
        double s = rhs[kk];
        for (std::size_t c = kk + 1; c < n; ++c) s -= M[kk * n + c] * out[c];
        out[kk] = s / M[kk * n + kk];
    }
    return true;
}

}  // namespace

double avar_variational(double lambda, const ProbSpace& space, const Claim& x) {
    // optimal m is attained at a loss level; scan all of them
    double best = 1e300;
    for (std::size_t c = 0; c < x.size(); ++c) {
        const double m = -x[c];
        double expect = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j)
            expect += space.weight(j) * std::max(-x[j] - m, 0.0);
        best = std::min(best, m + expect / lambda);
    }
    return best;
}

std::vector<SupportEquilibrium> support_enumeration(const PayoffTable& t) {
    if (t.rows > 3 || t.cols > 3)
        throw std::invalid_argument("support enumeration oracle is limited to 3x3");
    std::vector<SupportEquilibrium> found;
    const auto subsets = [](std::size_t n) {
        std::vector<std::vector<std::size_t>> out;
        for (std::size_t mask = 1; mask < (1u << n); ++mask) {
            std::vector<std::size_t> s;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1u << i)) s.push_back(i);
            out.push_back(std::move(s));
        }
        return out;
    };
    const double tol = 1e-9;
    for (const auto& S1 : subsets(t.rows)) {
        for (const auto& S2 : subsets(t.cols)) {
            if (S1.size() != S2.size()) continue;
            const std::size_t k = S1.size();
            // y on S2 makes firm 1 indifferent across S1; unknowns y, v1
            std::vector<double> M((k + 1) * (k + 1), 0.0), rhs(k + 1, 0.0), sol;
            for (std::size_t r = 0; r < k; ++r) {
                for (std::size_t c = 0; c < k; ++c) M[r * (k + 1) + c] = t.p1(S1[r], S2[c]);
                M[r * (k + 1) + k] = -1.0;
            }
            for (std::size_t c = 0; c < k; ++c) M[k * (k + 1) + c] = 1.0;
            rhs[k] = 1.0;
            if (!gauss_solve(M, rhs, k + 1, sol)) continue;
            std::vector<double> y(t.cols, 0.0);
            for (std::size_t c = 0; c < k; ++c) y[S2[c]] = sol[c];
            const double v1 = sol[k];
            // x on S1 makes firm 2 indifferent across S2
            std::vector<double> M2((k + 1) * (k + 1), 0.0), rhs2(k + 1, 0.0), sol2;
            for (std::size_t c = 0; c < k; ++c) {
                for (std::size_t r = 0; r < k; ++r) M2[c * (k + 1) + r] = t.p2(S1[r], S2[c]);
                M2[c * (k + 1) + k] = -1.0;
            }
            for (std::size_t r = 0; r < k; ++r) M2[k * (k + 1) + r] = 1.0;
            rhs2[k] = 1.0;
            if (!gauss_solve(M2, rhs2, k + 1, sol2)) continue;
            std::vector<double> x(t.rows, 0.0);
            for (std::size_t r = 0; r < k; ++r) x[S1[r]] = sol2[r];
            const double v2 = sol2[k];

            bool ok = true;
            for (double p : y)
                if (p < -tol) ok = false;
            for (double p : x)
                if (p < -tol) ok = false;
            // no profitable deviation outside the supports
            for (std::size_t r = 0; r < t.rows && ok; ++r) {
                double v = 0.0;
                for (std::size_t c = 0; c < t.cols; ++c) v += y[c] * t.p1(r, c);
                if (v > v1 + tol) ok = false;
            }
            for (std::size_t c = 0; c < t.cols && ok; ++c) {
                double v = 0.0;
                for (std::size_t r = 0; r < t.rows; ++r) v += x[r] * t.p2(r, c);
                if (v > v2 + tol) ok = false;
            }
            if (!ok) continue;
            SupportEquilibrium eq;
            eq.x = x;
            eq.y = y;
            eq.pure = k == 1;
            for (auto& p : eq.x) p = std::max(p, 0.0);
            for (auto& p : eq.y) p = std::max(p, 0.0);
            found.push_back(std::move(eq));
        }
    }
    return found;
}

LpOracleResult lp_enumeration_oracle(const std::vector<double>& cost,
                                     const std::vector<LinearConstraint>& constraints,
                                     const BoxBounds& box) {
    const std::size_t n = cost.size();
    std::vector<std::size_t> ineq, eqs;
    for (std::size_t i = 0; i < constraints.size(); ++i)
        (constraints[i].kind == LinearConstraint::Kind::Eq ? eqs : ineq).push_back(i);

    LpOracleResult best;
    const double tol = 1e-8;
    const auto try_candidate = [&](const std::vector<double>& x) {
        for (std::size_t j = 0; j < n; ++j)
            if (x[j] < box.lower[j] - tol || x[j] > box.upper[j] + tol) return;
        for (const auto& c : constraints) {
            double lhs = 0.0;
            for (std::size_t j = 0; j < n; ++j) lhs += c.coeffs[j] * x[j];
            if (c.kind == LinearConstraint::Kind::Eq) {
                if (std::abs(lhs - c.rhs) > tol) return;
            } else if (lhs > c.rhs + tol) {
                return;
            }
        }
        double obj = 0.0;
        for (std::size_t j = 0; j < n; ++j) obj += cost[j] * x[j];
        if (!best.feasible || obj < best.objective) {
            best.feasible = true;
            best.objective = obj;
        }
    };

    // active sets: all equality rows plus any subset of the inequalities,
    // matched by an equal number of off-bound (free) variables
    for (std::size_t mask = 0; mask < (1u << ineq.size()); ++mask) {
        std::vector<std::size_t> active = eqs;
        for (std::size_t i = 0; i < ineq.size(); ++i)
            if (mask & (1u << i)) active.push_back(ineq[i]);
        const std::size_t k = active.size();
        if (k > n) continue;
        std::vector<std::size_t> vars(n);
        for (std::size_t j = 0; j < n; ++j) vars[j] = j;
        // choose k free variables
        std::vector<bool> choose(n, false);
        std::fill(choose.begin(), choose.begin() + static_cast<std::ptrdiff_t>(k), true);
        std::sort(choose.begin(), choose.end());
        do {
            std::vector<std::size_t> freev, fixedv;
            for (std::size_t j = 0; j < n; ++j)
                (choose[j] ? freev : fixedv).push_back(j);
            if (freev.size() != k) continue;
            for (std::size_t bits = 0; bits < (1u << fixedv.size()); ++bits) {
                std::vector<double> x(n, 0.0);
                for (std::size_t j = 0; j < fixedv.size(); ++j)
                    x[fixedv[j]] =
                        (bits & (1u << j)) ? box.upper[fixedv[j]] : box.lower[fixedv[j]];
                if (k == 0) {
                    try_candidate(x);
                    continue;
                }
                std::vector<double> M(k * k, 0.0), rhs(k, 0.0), sol;
                for (std::size_t r = 0; r < k; ++r) {
                    const auto& con = constraints[active[r]];
                    double b = con.rhs;
                    for (std::size_t j : fixedv) b -= con.coeffs[j] * x[j];
                    rhs[r] = b;
                    for (std::size_t c = 0; c < k; ++c) M[r * k + c] = con.coeffs[freev[c]];
                }
                if (!gauss_solve(M, rhs, k, sol)) continue;
                for (std::size_t c = 0; c < k; ++c) x[freev[c]] = sol[c];
                try_candidate(x);
            }
        } while (std::next_permutation(choose.begin(), choose.end()));
    }
    return best;
}

BruteForceResult tiny_brute_force_search(const Scenario& tiny, std::size_t resolution,
                                         double s_max, Exec exec) {
    if (tiny.space.atom_count() != 2 || tiny.grid.cells() != 2)
        throw std::invalid_argument("brute-force oracle expects the 2-atom, 2-cell instance");
    if (tiny.firm1.risk.kind != RiskKind::Entropic || tiny.firm2.risk.kind != RiskKind::Entropic)
        throw std::invalid_argument("brute-force oracle expects entropic firms");

    // self-contained assembly on the reduced (s0, s1, z1, z2, K) box
    const double h = tiny.grid.cell_width();
    const double th0 = tiny.grid.midpoint(0), th1 = tiny.grid.midpoint(1);
    const double mu0 = tiny.grid.cell_weight(0), mu1 = tiny.grid.cell_weight(1);
    const double w0 = tiny.space.weight(0), w1 = tiny.space.weight(1);
    const double g1 = tiny.firm1.risk.risk_aversion, g2 = tiny.firm2.risk.risk_aversion;
    const double W10 = tiny.firm1.endowment[0], W11 = tiny.firm1.endowment[1];
    const double W20 = tiny.firm2.endowment[0], W21 = tiny.firm2.endowment[1];

    const auto entropic2 = [&](double gamma, double x0, double x1) {
        const double m = std::max(-gamma * x0, -gamma * x1);
        return (m + std::log(w0 * std::exp(-gamma * x0 - m) + w1 * std::exp(-gamma * x1 - m))) /
               gamma;
    };
    const auto objective = [&](double s0, double s1, double z1, double z2, double K) {
        const double v1 = 0.5 * s1 * s1 * h;
        const double v0 = 0.5 * s0 * s0 * h + s1 * s1 * h;
        const double cost = (v0 + th0 * s0 * s0) * mu0 + (v1 + th1 * s1 * s1) * mu1;
        const double S = s0 * mu0 + s1 * mu1;
        const double a1 = K * S, a2 = (1.0 - K) * S;
        // mean-zero unit-second-moment claims on two uniform atoms: (z, -z)
        const double r1 = entropic2(g1, W10 - a1 * z1, W11 + a1 * z1);
        const double r2 = entropic2(g2, W20 - a2 * z2, W21 + a2 * z2);
        return r1 + r2 + cost;
    };

    const std::ptrdiff_t R = static_cast<std::ptrdiff_t>(resolution);
    const auto grid01 = [&](std::ptrdiff_t i) {
        return static_cast<double>(i) / static_cast<double>(R - 1);
    };

    struct Best {
        double val = 1e300;
        std::ptrdiff_t idx[5] = {0, 0, 0, 0, 0};
    };
    const auto scan_s0 = [&](std::ptrdiff_t i0, Best& b) {
        const double s0 = grid01(i0) * s_max;
        for (std::ptrdiff_t i1 = 0; i1 < R; ++i1) {
            const double s1 = grid01(i1) * s0;  // keeps the slope nonincreasing
            for (std::ptrdiff_t iz1 = 0; iz1 < R; ++iz1) {
                const double z1 = 2.0 * grid01(iz1) - 1.0;
                for (std::ptrdiff_t iz2 = 0; iz2 < R; ++iz2) {
                    const double z2 = 2.0 * grid01(iz2) - 1.0;
                    for (std::ptrdiff_t iK = 0; iK < R; ++iK) {
                        const double K = grid01(iK);
                        const double v = objective(s0, s1, z1, z2, K);
                        if (v < b.val) {
                            b.val = v;
                            b.idx[0] = i0; b.idx[1] = i1; b.idx[2] = iz1;
                            b.idx[3] = iz2; b.idx[4] = iK;
                        }
                    }
                }
            }
        }
    };

    Best best;
    if (exec == Exec::Parallel) {
        std::vector<Best> partial(static_cast<std::size_t>(R));
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i0 = 0; i0 < R; ++i0) scan_s0(i0, partial[static_cast<std::size_t>(i0)]);
        for (const Best& b : partial) {
            if (b.val < best.val ||
                (b.val == best.val && std::lexicographical_compare(b.idx, b.idx + 5, best.idx,
                                                                   best.idx + 5)))
                best = b;
        }
    } else {
        for (std::ptrdiff_t i0 = 0; i0 < R; ++i0) scan_s0(i0, best);
    }

    BruteForceResult out;
    out.best = best.val;
    out.s0 = grid01(best.idx[0]) * s_max;
    out.s1 = grid01(best.idx[1]) * out.s0;
    out.z1 = 2.0 * grid01(best.idx[2]) - 1.0;
    out.z2 = 2.0 * grid01(best.idx[3]) - 1.0;
    out.K = grid01(best.idx[4]);
    out.interior = best.idx[0] + 1 < R;
    return out;
}

// ---------------------------------------------------------------------------
// suites
// ---------------------------------------------------------------------------

namespace {

OracleReport suite_fd_gradients() {
    OracleReport rep;
    rep.suite = "fd-gradients";
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    const ProbSpace space(14);
    const double fd_h = 1e-6;
    double worst = 0.0;

    const auto check = [&](const RiskMeasureSpec& spec, const Claim& x) {
        const Claim g = subgradient(spec, space, x);
        double gmax = 1e-12;
        for (std::size_t j = 0; j < x.size(); ++j) gmax = std::max(gmax, std::abs(g[j]));
        for (std::size_t j = 0; j < x.size(); ++j) {
            Claim up = x, dn = x;
            up[j] += fd_h;
            dn[j] -= fd_h;
            const double fd =
                (evaluate(spec, space, up) - evaluate(spec, space, dn)) / (2.0 * fd_h);
            worst = std::max(worst, std::abs(fd - g[j]) / gmax);
        }
    };

    for (int rep_i = 0; rep_i < 20; ++rep_i) {
        Claim x = Claim::zeros(14);
        for (auto& v : x.payoffs) v = uni(rng);
        check(RiskMeasureSpec::entropic(2.0), x);
        check(RiskMeasureSpec::entropic(0.7), x);
        // AV@R is kinked at loss ties; sample away from them
        bool tied = true;
        while (tied) {
            for (auto& v : x.payoffs) v = uni(rng);
            tied = false;
            for (std::size_t i = 0; i < x.size() && !tied; ++i)
                for (std::size_t j = i + 1; j < x.size(); ++j)
                    if (std::abs(x[i] - x[j]) < 1e-3) { tied = true; break; }
        }
        check(RiskMeasureSpec::avar(0.3), x);
        check(RiskMeasureSpec::avar(0.75), x);
    }
    rep.worst_residual = worst;
    rep.passed = worst < 1e-5;
    rep.lines.push_back(fmtline("max relative gradient error: %.3g (threshold 1e-5)", worst));
    return rep;
}

OracleReport suite_tiny_brute_force() {
    OracleReport rep;
    rep.suite = "tiny-brute-force";
    Scenario tiny = parse_scenario(bundled_scenario_text("tiny-2x2"), "tiny-2x2");
    const PlannerResult res = solve(tiny.firm1, tiny.firm2, tiny.space, tiny.grid, tiny.solver);
    const BruteForceResult bf = tiny_brute_force_search(tiny, 21, 2.0, Exec::Parallel);
    const double gap = std::abs(bf.best - res.aggregate) / std::abs(res.aggregate);
    rep.worst_residual = gap;
    rep.passed = gap <= 0.02 && bf.interior;
    rep.lines.push_back(fmtline("solver aggregate %.6f, grid optimum %.6f", res.aggregate, bf.best));
    rep.lines.push_back(fmtline("relative gap %.4f (threshold 0.02)", gap));
    if (!bf.interior) rep.lines.push_back("WARNING: grid argmin on the search-box boundary");
    return rep;
}

OracleReport suite_fixmix() {
    OracleReport rep;
    rep.suite = "fixmix-equivalence";
    Scenario s = parse_scenario(bundled_scenario_text("entropic-5.2"), "entropic-5.2");
    s.solver.max_iterations = 800;
    const PlannerResult res = solve(s.firm1, s.firm2, s.space, s.grid, s.solver);
    if (!res.fix_mix_ratio) {
        rep.lines.push_back("no fix-mix ratio extracted (no trade?)");
        return rep;
    }
    const double K = *res.fix_mix_ratio;
    DecisionVector constant = res.decision;
    constant.tbr = TieBreakRule::constant(s.grid.cells(), K);
    const Assembly a0 =
        assemble_objective(s.firm1, s.firm2, res.decision, s.space, s.grid, s.solver.mode);
    const Assembly a1 =
        assemble_objective(s.firm1, s.firm2, constant, s.space, s.grid, s.solver.mode);
    double worst = std::abs(a0.aggregate - a1.aggregate);
    worst = std::max(worst, std::abs(a0.firm[0].aggregator - a1.firm[0].aggregator));
    worst = std::max(worst, std::abs(a0.firm[1].aggregator - a1.firm[1].aggregator));

    // independent quadrature route for K on random schedules and rules:
    // integrate the piecewise-linear slope from cell-endpoint averages
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int it = 0; it < 50; ++it) {
        UtilitySchedule sch;
        sch.alpha.resize(s.grid.cells());
        for (auto& a : sch.alpha) a = 2.0 * uni(rng);
        sch.tail_slope = uni(rng);
        TieBreakRule f = TieBreakRule::constant(s.grid.cells(), 0.0);
        for (auto& w : f.weights) w = uni(rng);
        double num = 0.0, den = 0.0;
        const double h = s.grid.cell_width();
        for (std::size_t k = 0; k < s.grid.cells(); ++k) {
            double right = sch.tail_slope;  // slope at the cell's right edge
            for (std::size_t j = k + 1; j < s.grid.cells(); ++j) right += sch.alpha[j] * h;
            const double left = right + sch.alpha[k] * h;
            const double avg = 0.5 * (left + right);
            num += avg * f.weights[k] * s.grid.cell_weight(k);
            den += avg * s.grid.cell_weight(k);
        }
        PlannerResult fake;
        fake.decision.schedule1 = sch;
        fake.decision.tbr = f;
        const auto got = extract_fix_mix(fake, sch, s.grid);
        if (!got) {
            worst = std::max(worst, 1.0);
            continue;
        }
        worst = std::max(worst, std::abs(*got - num / den));
    }
    rep.worst_residual = worst;
    rep.passed = worst < 1e-9;
    rep.lines.push_back(fmtline("K = %.4f", K));
    rep.lines.push_back(fmtline("max aggregator/aggregate/quadrature residual: %.3g "
                                "(threshold 1e-9)", worst));
    return rep;
}

OracleReport suite_lp_vertex() {
    OracleReport rep;
    rep.suite = "lp-vertex";
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double worst = 0.0;
    int disagreements = 0;
    for (int it = 0; it < 120; ++it) {
        const std::size_t n = 5;
        std::vector<double> cost(n);
        for (auto& c : cost) c = uni(rng);
        BoxBounds box;
        box.lower.resize(n);
        box.upper.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double a = uni(rng), b = uni(rng);
            box.lower[j] = std::min(a, b);
            box.upper[j] = std::max(a, b);
        }
        std::vector<LinearConstraint> cons;
        const int nineq = it % 3;
        for (int i = 0; i < nineq; ++i) {
            std::vector<double> row(n);
            for (auto& v : row) v = uni(rng);
            cons.push_back(LinearConstraint::less_eq(std::move(row), uni(rng)));
        }
        if (it % 4 == 0) {
            std::vector<double> row(n);
            for (auto& v : row) v = uni(rng);
            cons.push_back(LinearConstraint::eq(std::move(row), 0.3 * uni(rng)));
        }
        const LpResult got = solve_lp(cost, cons, box);
        const LpOracleResult want = lp_enumeration_oracle(cost, cons, box);
        if (got.ok() != want.feasible) {
            ++disagreements;
            continue;
        }
        if (got.ok()) worst = std::max(worst, std::abs(got.objective - want.objective));
    }
    rep.worst_residual = worst;
    rep.passed = disagreements == 0 && worst < 1e-8;
    rep.lines.push_back(fmtline("feasibility disagreements: %.0f", disagreements));
    rep.lines.push_back(fmtline("max objective gap: %.3g (threshold 1e-8)", worst));
    return rep;
}

OracleReport suite_nash_support() {
    OracleReport rep;
    rep.suite = "nash-support";
    std::mt19937_64 rng(990115);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double worst_eps = 0.0;
    int pure_mismatches = 0;
    int pure_instances = 0;
    for (int it = 0; it < 40; ++it) {
        PayoffTable t;
        t.rows = t.cols = 3;
        t.pi1.resize(9);
        t.pi2.resize(9);
        for (auto& v : t.pi1) v = uni(rng);
        for (auto& v : t.pi2) v = uni(rng);
        const NashResult got = fictitious_play(t, 100000, 0.01);
        worst_eps = std::max(worst_eps, got.eps);
        const auto eqs = support_enumeration(t);
        bool has_pure = false;
        for (const auto& e : eqs) has_pure = has_pure || e.pure;
        if (!has_pure) continue;
        ++pure_instances;
        // a pure equilibrium exists; the purified profile must be one of them
        bool matched = false;
        for (const auto& e : eqs) {
            if (!e.pure) continue;
            bool same = true;
            for (std::size_t r = 0; r < 3; ++r)
                if (std::abs(e.x[r] - got.profile1.probabilities[r]) > 1e-9) same = false;
            for (std::size_t c = 0; c < 3; ++c)
                if (std::abs(e.y[c] - got.profile2.probabilities[c]) > 1e-9) same = false;
            matched = matched || same;
        }
        if (!matched || got.eps > 1e-9) ++pure_mismatches;
    }
    rep.worst_residual = worst_eps;
    rep.passed = worst_eps <= 0.01 && pure_mismatches == 0;
    rep.lines.push_back(fmtline("worst eps over 40 random tables: %.5f (threshold 0.01)", worst_eps));
    rep.lines.push_back(fmtline("pure instances: %.0f, mismatches: %.0f",
                                static_cast<double>(pure_instances),
                                static_cast<double>(pure_mismatches)));
    return rep;
}

OracleReport suite_fixed_point() {
    OracleReport rep;
    rep.suite = "fixed-point";
    Scenario s = parse_scenario(bundled_scenario_text("entropic-5.2"), "entropic-5.2");
    double worst = 0.0;
    for (double a : {0.0, 0.4, 0.9}) {
        const Claim z1 = entropic_fixed_point_solve(s.firm1, s.space, a);
        worst = std::max(worst, entropic_fixed_point_residual(s.firm1, s.space, a, z1));
        const Claim z2 = entropic_fixed_point_solve(s.firm2, s.space, a);
        worst = std::max(worst, entropic_fixed_point_residual(s.firm2, s.space, a, z2));
    }
    // degenerate branch: a constant endowment forces the Z = 0 convention
    FirmSpec flat;
    flat.endowment = Claim::constant(s.space.atom_count(), -1.0);
    flat.risk = RiskMeasureSpec::entropic(2.0);
    const Claim z = entropic_fixed_point_solve(flat, s.space, 0.0);
    double znorm = 0.0;
    for (double v : z.payoffs) znorm = std::max(znorm, std::abs(v));
    rep.worst_residual = std::max(worst, znorm);
    rep.passed = rep.worst_residual < 1e-8;
    rep.lines.push_back(fmtline("max damped fixed-point residual: %.3g (threshold 1e-8)",
                                rep.worst_residual));
    return rep;
}

OracleReport suite_avar_tail() {
    OracleReport rep;
    rep.suite = "avar-tail";
    const ProbSpace space(14);
    Scenario s = parse_scenario(bundled_scenario_text("avar-5.3"), "avar-5.3");
    double worst = 0.0;
    worst = std::max(worst, std::abs(evaluate(s.firm1.risk, space, s.firm1.endowment) -
                                     avar_variational(0.05, space, s.firm1.endowment)));
    worst = std::max(worst, std::abs(evaluate(s.firm2.risk, space, s.firm2.endowment) -
                                     avar_variational(0.10, space, s.firm2.endowment)));
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> uni(-3.0, 3.0);
    std::uniform_real_distribution<double> unilam(0.02, 1.0);
    for (int it = 0; it < 200; ++it) {
        Claim x = Claim::zeros(14);
        for (auto& v : x.payoffs) v = uni(rng);
        const RiskMeasureSpec spec = RiskMeasureSpec::avar(unilam(rng));
        worst = std::max(worst, std::abs(evaluate(spec, space, x) -
                                         avar_variational(spec.tail_level, space, x)));
    }
    rep.worst_residual = worst;
    rep.passed = worst < 1e-10;
    rep.lines.push_back(fmtline("max two-route AV@R gap: %.3g (threshold 1e-10)", worst));
    return rep;
}

}  // namespace

std::vector<std::string> oracle_suite_names() {
    return {"fd-gradients", "tiny-brute-force", "fixmix-equivalence",
            "lp-vertex",    "nash-support",     "fixed-point",
            "avar-tail"};
}

OracleReport run_oracle(const std::string& suite) {
    if (suite == "fd-gradients") return suite_fd_gradients();
    if (suite == "tiny-brute-force") return suite_tiny_brute_force();
    if (suite == "fixmix-equivalence") return suite_fixmix();
    if (suite == "lp-vertex") return suite_lp_vertex();
    if (suite == "nash-support") return suite_nash_support();
    if (suite == "fixed-point") return suite_fixed_point();
    if (suite == "avar-tail") return suite_avar_tail();
    throw std::invalid_argument("unknown oracle suite '" + suite + "'");
}

}  // namespace riskshare
