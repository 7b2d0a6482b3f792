#include "riskshare/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "riskshare/lp.hpp"

namespace riskshare {

DecisionVector DecisionVector::zero(std::size_t n, std::size_t d) {
    DecisionVector dec;
    dec.schedule1 = UtilitySchedule::zero(n);
    dec.schedule2 = UtilitySchedule::zero(n);
    dec.beta1.assign(d, 0.0);
    dec.beta2.assign(d, 0.0);
    dec.tbr = TieBreakRule::constant(n, 0.0);
    return dec;
}

namespace {

double weighted_mean(const ProbSpace& space, const std::vector<double>& z) {
    double s = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) s += space.weight(j) * z[j];
    return s;
}

double second_moment(const ProbSpace& space, const std::vector<double>& z) {
    double s = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) s += space.weight(j) * z[j] * z[j];
    return s;
}

}  // namespace

void DecisionVector::validate(const ProbSpace& space) const {
    if (!schedule1.valid() || !schedule2.valid())
        throw std::invalid_argument("decision schedule violates nonnegativity");
    if (!tbr.valid()) throw std::invalid_argument("tie-break weights must lie in [0, 1]");
    for (const auto* beta : {&beta1, &beta2}) {
        if (beta->size() != space.atom_count())
            throw std::invalid_argument("beta dimension does not match probability space");
        if (std::abs(weighted_mean(space, *beta)) > 1e-10)
            throw std::invalid_argument("beta must have zero mean");
        if (second_moment(space, *beta) > 1.0 + 1e-10)
            throw std::invalid_argument("beta second moment exceeds 1");
    }
}

namespace {

std::vector<double> firm1_shares(const DecisionVector& dec, const MarketSegmentation& seg,
                                 ScheduleMode mode, std::size_t n) {
    std::vector<double> share(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (mode == ScheduleMode::Shared) {
            share[k] = dec.tbr.weights[k];
        } else {
            switch (seg.cell_class[k]) {
                case 1: share[k] = 1.0; break;
                case 2: share[k] = 0.0; break;
                default: share[k] = dec.tbr.weights[k];
            }
        }
    }
    return share;
}

}  // namespace

Assembly assemble_objective(const FirmSpec& firm1, const FirmSpec& firm2,
                            const DecisionVector& decision, const ProbSpace& space,
                            const TypeGrid& grid, ScheduleMode mode) {
    decision.validate(space);
    const std::size_t n = grid.cells();
    const std::size_t d = space.atom_count();
    if (firm1.endowment.size() != d || firm2.endowment.size() != d)
        throw std::invalid_argument("endowment dimension does not match probability space");

    Assembly out;
    out.values1 = reconstruct_v(decision.schedule1, grid);
    if (mode == ScheduleMode::PerFirm) {
        out.values2 = reconstruct_v(decision.schedule2, grid);
        out.segmentation = segment_market(decision.schedule1, decision.schedule2, grid, 0.0);
    } else {
        out.values2 = out.values1;
        out.segmentation.cell_class.assign(n, 0);
    }
    out.share1 = firm1_shares(decision, out.segmentation, mode, n);

    const FirmSpec* firms[2] = {&firm1, &firm2};
    const std::vector<double>* betas[2] = {&decision.beta1, &decision.beta2};
    const ScheduleValues* values[2] = {&out.values1, &out.values2};

    for (int i = 0; i < 2; ++i) {
        FirmOutcome& fo = out.firm[i];
        double a = 0.0, income = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double share = i == 0 ? out.share1[k] : 1.0 - out.share1[k];
            const double mu = grid.cell_weight(k);
            a += values[i]->slope[k] * share * mu;
            income += (grid.midpoint(k) * values[i]->v_prime[k] - values[i]->v[k]) * share * mu;
        }
        Claim position = firms[i]->endowment;
        for (std::size_t j = 0; j < d; ++j) position[j] -= a * (*betas[i])[j];
        fo.aggregator = a;
        fo.income = income;
        fo.risk = evaluate(firms[i]->risk, space, position);
        fo.assessment = fo.risk - fo.income;
        out.aggregate += fo.assessment;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Hybrid block descent
// ---------------------------------------------------------------------------

namespace {

enum class BlockKind { Alpha1, Tail1, Alpha2, Tail2, Beta1, Beta2, Tbr };

struct Block {
    BlockKind kind;
    std::string name;
    double cube;
};

/// Mutable optimizer state plus everything needed to evaluate it.
struct Work {
    const FirmSpec* firms[2];
    const ProbSpace* space;
    const TypeGrid* grid;
    ScheduleMode mode;
    DecisionVector dec;
    Assembly cur;

    void refresh() {
        cur = assemble_objective(*firms[0], *firms[1], dec, *space, *grid, mode);
    }
};

/// dA_i/ds_k for one firm, holding the market segmentation fixed.
/// Collects the risk channel (through the aggregator) and the income
/// channel (through v and v').
std::vector<double> assessment_slope_grad(const Work& w, int i) {
    const std::size_t n = w.grid->cells();
    const ScheduleValues& vals = i == 0 ? w.cur.values1 : w.cur.values2;
    const std::vector<double>& beta = i == 0 ? w.dec.beta1 : w.dec.beta2;
    const double h = w.grid->cell_width();

    Claim position = w.firms[i]->endowment;
    for (std::size_t j = 0; j < position.size(); ++j)
        position[j] -= w.cur.firm[i].aggregator * beta[j];
    const Claim g = subgradient(w.firms[i]->risk, *w.space, position);
    double D = 0.0;  // dR_i/da_i = sum_j q_j beta_j with q = -g
    for (std::size_t j = 0; j < position.size(); ++j) D += (-g[j]) * beta[j];

    std::vector<double> grad(n, 0.0);
    double below = 0.0;  // sum over cells m < k of share_m mu_m
    for (std::size_t k = 0; k < n; ++k) {
        const double share = i == 0 ? w.cur.share1[k] : 1.0 - w.cur.share1[k];
        const double mu = w.grid->cell_weight(k);
        const double s = vals.slope[k];
        grad[k] = D * share * mu + 2.0 * s * w.grid->midpoint(k) * share * mu +
                  h * s * (share * mu + 2.0 * below);
        below += share * mu;
    }
    return grad;
}

/// Chain rule from slope space to (alpha, tail): ds_k/dalpha_m is h/2 on the
/// diagonal and h for m > k; ds_k/dtail is 1.
void slope_to_alpha_grad(const TypeGrid& grid, const std::vector<double>& dA_ds,
                         std::vector<double>& dA_dalpha, double& dA_dtail) {
    const std::size_t n = grid.cells();
    const double h = grid.cell_width();
    dA_dalpha.assign(n, 0.0);
    dA_dtail = 0.0;
    double prefix = 0.0;  // sum over k < m of dA_ds[k]
    for (std::size_t m = 0; m < n; ++m) {
        dA_dalpha[m] = 0.5 * h * dA_ds[m] + h * prefix;
        prefix += dA_ds[m];
        dA_dtail += dA_ds[m];
    }
}

struct BlockGradients {
    std::vector<double> x0;       // current block values
    std::vector<double> agg;      // d aggregate / d block
    std::vector<double> firm[2];  // d A_i / d block
    BoxBounds box;
    std::vector<LinearConstraint> rows;
};

BlockGradients block_gradients(const Work& w, const Block& blk, bool enforce_ir,
                               const double rho_w[2]) {
    const std::size_t n = w.grid->cells();
    const std::size_t d = w.space->atom_count();
    BlockGradients bg;

    const auto schedule_block = [&](int i, bool tail_only) {
        const std::vector<double> ds = assessment_slope_grad(w, i);
        std::vector<double> dalpha;
        double dtail = 0.0;
        slope_to_alpha_grad(*w.grid, ds, dalpha, dtail);
        const UtilitySchedule& sch = i == 0 ? w.dec.schedule1 : w.dec.schedule2;
        if (tail_only) {
            bg.x0 = {sch.tail_slope};
            bg.firm[i] = {dtail};
            bg.firm[1 - i] = {0.0};
            bg.box.lower = {0.0};
            bg.box.upper = {1e30};
        } else {
            bg.x0 = sch.alpha;
            bg.firm[i] = dalpha;
            bg.firm[1 - i].assign(n, 0.0);
            bg.box.lower.assign(n, 0.0);
            bg.box.upper.assign(n, 1e30);
        }
        // Shared mode: the one schedule drives both firms
        if (w.mode == ScheduleMode::Shared) {
            const std::vector<double> ds2 = assessment_slope_grad(w, 1);
            std::vector<double> dalpha2;
            double dtail2 = 0.0;
            slope_to_alpha_grad(*w.grid, ds2, dalpha2, dtail2);
            bg.firm[1] = tail_only ? std::vector<double>{dtail2} : dalpha2;
        }
    };

    switch (blk.kind) {
        case BlockKind::Alpha1: schedule_block(0, false); break;
        case BlockKind::Tail1: schedule_block(0, true); break;
        case BlockKind::Alpha2: schedule_block(1, false); break;
        case BlockKind::Tail2: schedule_block(1, true); break;
        case BlockKind::Beta1:
        case BlockKind::Beta2: {
            const int i = blk.kind == BlockKind::Beta1 ? 0 : 1;
            const std::vector<double>& beta = i == 0 ? w.dec.beta1 : w.dec.beta2;
            Claim position = w.firms[i]->endowment;
            for (std::size_t j = 0; j < d; ++j)
                position[j] -= w.cur.firm[i].aggregator * beta[j];
            const Claim g = subgradient(w.firms[i]->risk, *w.space, position);
            bg.x0 = beta;
            bg.firm[i].resize(d);
            for (std::size_t j = 0; j < d; ++j)
                bg.firm[i][j] = w.cur.firm[i].aggregator * (-g[j]);
            bg.firm[1 - i].assign(d, 0.0);
            bg.box.lower.assign(d, -1e30);
            bg.box.upper.assign(d, 1e30);
            // E[Z] = 0 and the relaxed, linearized second-moment constraint
            std::vector<double> wrow(d), vrow(d);
            double m2 = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                wrow[j] = w.space->weight(j);
                vrow[j] = 2.0 * w.space->weight(j) * beta[j];
                m2 += w.space->weight(j) * beta[j] * beta[j];
            }
            bg.rows.push_back(LinearConstraint::eq(std::move(wrow), 0.0));
            bg.rows.push_back(LinearConstraint::less_eq(std::move(vrow), 1.0 + m2));
            break;
        }
        case BlockKind::Tbr: {
            bg.x0 = w.dec.tbr.weights;
            bg.firm[0].assign(n, 0.0);
            bg.firm[1].assign(n, 0.0);
            bg.box.lower.assign(n, 0.0);
            bg.box.upper.assign(n, 1.0);
            double D[2];
            for (int i = 0; i < 2; ++i) {
                const std::vector<double>& beta = i == 0 ? w.dec.beta1 : w.dec.beta2;
                Claim position = w.firms[i]->endowment;
                for (std::size_t j = 0; j < d; ++j)
                    position[j] -= w.cur.firm[i].aggregator * beta[j];
                const Claim g = subgradient(w.firms[i]->risk, *w.space, position);
                D[i] = 0.0;
                for (std::size_t j = 0; j < d; ++j) D[i] += (-g[j]) * beta[j];
            }
            const ScheduleValues* vals[2] = {&w.cur.values1, &w.cur.values2};
            for (std::size_t k = 0; k < n; ++k) {
                const bool tied =
                    w.mode == ScheduleMode::Shared || w.cur.segmentation.cell_class[k] == 0;
                if (!tied) {
                    // the rule is inert off the tie region; pin the variable
                    bg.box.lower[k] = w.dec.tbr.weights[k];
                    bg.box.upper[k] = w.dec.tbr.weights[k];
                    continue;
                }
                const double mu = w.grid->cell_weight(k);
                const double price1 =
                    w.grid->midpoint(k) * vals[0]->v_prime[k] - vals[0]->v[k];
                const double price2 =
                    w.grid->midpoint(k) * vals[1]->v_prime[k] - vals[1]->v[k];
                bg.firm[0][k] = D[0] * vals[0]->slope[k] * mu - price1 * mu;
                bg.firm[1][k] = -D[1] * vals[1]->slope[k] * mu + price2 * mu;
            }
            break;
        }
    }

    bg.agg.resize(bg.x0.size());
    for (std::size_t j = 0; j < bg.x0.size(); ++j) bg.agg[j] = bg.firm[0][j] + bg.firm[1][j];

    if (enforce_ir) {
        for (int i = 0; i < 2; ++i) {
            double dot = 0.0;
            for (std::size_t j = 0; j < bg.x0.size(); ++j) dot += bg.firm[i][j] * bg.x0[j];
            bg.rows.push_back(LinearConstraint::less_eq(
                bg.firm[i], rho_w[i] - w.cur.firm[i].assessment + dot));
        }
    }
    return bg;
}

void write_block(Work& w, const Block& blk, const std::vector<double>& x) {
    switch (blk.kind) {
        case BlockKind::Alpha1: w.dec.schedule1.alpha = x; break;
        case BlockKind::Tail1: w.dec.schedule1.tail_slope = x[0]; break;
        case BlockKind::Alpha2: w.dec.schedule2.alpha = x; break;
        case BlockKind::Tail2: w.dec.schedule2.tail_slope = x[0]; break;
        case BlockKind::Beta1: w.dec.beta1 = x; break;
        case BlockKind::Beta2: w.dec.beta2 = x; break;
        case BlockKind::Tbr: w.dec.tbr.weights = x; break;
    }
    if (w.mode == ScheduleMode::Shared) w.dec.schedule2 = w.dec.schedule1;
}

/// The natural hedge direction at zero trade: the risk measure's tilt at the
/// endowment, centered and scaled to unit second moment. At a zero
/// aggregator the objective is flat in beta, so descent needs this
/// representative of the no-trade equivalence class to get moving.
std::vector<double> bootstrap_direction(const FirmSpec& firm, const ProbSpace& space) {
    const std::size_t d = space.atom_count();
    const Claim g = subgradient(firm.risk, space, firm.endowment);
    std::vector<double> r(d);
    for (std::size_t j = 0; j < d; ++j) r[j] = -g[j] / space.weight(j);
    const double mean = weighted_mean(space, r);
    // minus sign: the position is W - a Z, so the hedge adds payoff where
    // the tilt is heavy
    std::vector<double> z(d);
    for (std::size_t j = 0; j < d; ++j) z[j] = -(r[j] - mean);
    const double sd = std::sqrt(second_moment(space, z));
    if (sd < 1e-12) return std::vector<double>(d, 0.0);
    for (auto& v : z) v /= sd;
    return z;
}

}  // namespace

namespace {

/// Project onto the feasible hedge set: weighted mean zero, second moment
/// at most one.
void clean_hedge(const ProbSpace& space, std::vector<double>& z) {
    const double m = weighted_mean(space, z);
    for (auto& v : z) v -= m;
    const double m2 = second_moment(space, z);
    if (m2 > 1.0) {
        const double s = std::sqrt(m2);
        for (auto& v : z) v /= s;
    }
}

/// Inner AV@R hedge: minimize the epigraph form
///   m + (1/lambda) sum w_j u_j,  u_j >= -(W_j - a z_j) - m,  u_j >= 0
/// over the ball E[z^2] <= 1 with E[z] = 0. All tail kinks live in linear
/// rows, so the LP sees the full polyhedral structure; only the ball is
/// linearized and re-trusted.
std::vector<double> avar_hedge(double lambda, const ProbSpace& space, const Claim& W, double a) {
    const std::size_t d = space.atom_count();
    FirmSpec probe{W, RiskMeasureSpec::avar(lambda)};
    std::vector<double> z = bootstrap_direction(probe, space);
    const auto value = [&](const std::vector<double>& zz) {
        Claim pos = W;
        for (std::size_t j = 0; j < d; ++j) pos[j] -= a * zz[j];
        return evaluate(probe.risk, space, pos);
    };
    double best = value(z);
    double cube = 1.0;
    for (int it = 0; it < 80 && cube > 1e-9; ++it) {
        // variables: z (d), m (1), u (d)
        const std::size_t nv = 2 * d + 1;
        std::vector<double> cost(nv, 0.0);
        cost[d] = 1.0;
        for (std::size_t j = 0; j < d; ++j) cost[d + 1 + j] = space.weight(j) / lambda;
        std::vector<LinearConstraint> rows;
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<double> row(nv, 0.0);
            row[j] = a;
            row[d] = -1.0;
            row[d + 1 + j] = -1.0;
            rows.push_back(LinearConstraint::less_eq(std::move(row), W[j]));
        }
        {
            std::vector<double> row(nv, 0.0);
            for (std::size_t j = 0; j < d; ++j) row[j] = space.weight(j);
            rows.push_back(LinearConstraint::eq(std::move(row), 0.0));
        }
        {
            std::vector<double> row(nv, 0.0);
            double m2 = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                row[j] = 2.0 * space.weight(j) * z[j];
                m2 += space.weight(j) * z[j] * z[j];
            }
            rows.push_back(LinearConstraint::less_eq(std::move(row), 1.0 + m2));
        }
        // center: current z with the exact (m, u) for it
        std::vector<double> center(nv, 0.0);
        for (std::size_t j = 0; j < d; ++j) center[j] = z[j];
        Claim pos = W;
        for (std::size_t j = 0; j < d; ++j) pos[j] -= a * z[j];
        double var_level = -1e300;  // m = current worst loss works as a center
        for (std::size_t j = 0; j < d; ++j) var_level = std::max(var_level, -pos[j]);
        center[d] = var_level;
        BoxBounds box;
        box.lower.assign(nv, -1e30);
        box.upper.assign(nv, 1e30);
        for (std::size_t j = 0; j < d; ++j) box.lower[d + 1 + j] = 0.0;
        const LpResult lp = lp_trust_region(cost, rows, center, cube, box);
        if (!lp.ok()) {
            cube *= 0.5;
            continue;
        }
        std::vector<double> cand(lp.point.begin(), lp.point.begin() + static_cast<long>(d));
        clean_hedge(space, cand);
        const double v = value(cand);
        if (v < best - 1e-13) {
            best = v;
            z = cand;
            cube = std::min(cube * 2.0, 1.0);
        } else {
            cube *= 0.5;
        }
    }
    return z;
}

}  // namespace

Claim optimal_hedge(const RiskMeasureSpec& risk, const ProbSpace& space, const Claim& endowment,
                    double a) {
    FirmSpec firm{endowment, risk};
    if (a <= 0.0) return Claim(bootstrap_direction(firm, space));
    std::vector<double> best = bootstrap_direction(firm, space);
    const auto value = [&](const std::vector<double>& zz) {
        Claim pos = endowment;
        for (std::size_t j = 0; j < zz.size(); ++j) pos[j] -= a * zz[j];
        return evaluate(risk, space, pos);
    };
    if (risk.kind == RiskKind::Entropic) {
        Claim fp = entropic_fixed_point_solve(firm, space, a);
        std::vector<double> z = fp.payoffs;
        clean_hedge(space, z);
        if (value(z) < value(best)) best = z;
    } else {
        std::vector<double> z = avar_hedge(risk.tail_level, space, endowment, a);
        clean_hedge(space, z);
        if (value(z) < value(best)) best = z;
    }
    return Claim(std::move(best));
}

RepairResult feasibility_repair(const std::vector<double>& point,
                                const std::vector<double>& violated_gradient,
                                const std::function<double(const std::vector<double>&)>& max_violation,
                                int max_backtracks, double tol) {
    RepairResult out;
    out.point = point;
    const double v0 = max_violation(point);
    if (v0 <= tol) {
        out.ok = true;
        return out;
    }
    double gnorm2 = 0.0;
    for (double g : violated_gradient) gnorm2 += g * g;
    if (gnorm2 <= 0.0) return out;
    const double t0 = v0 / gnorm2;  // exact for an affine constraint
    double t = t0;
    for (int k = 0; k < max_backtracks; ++k) {
        std::vector<double> cand(point.size());
        for (std::size_t j = 0; j < point.size(); ++j)
            cand[j] = point[j] - t * violated_gradient[j];
        if (max_violation(cand) <= tol) {
            out.ok = true;
            out.point = std::move(cand);
            out.backtracks = k;
            return out;
        }
        t *= 1.5;
    }
    return out;
}

PlannerResult solve(const FirmSpec& firm1, const FirmSpec& firm2, const ProbSpace& space,
                    const TypeGrid& grid, const PlannerConfig& config) {
    const std::size_t n = grid.cells();
    const std::size_t d = space.atom_count();

    Work w;
    w.firms[0] = &firm1;
    w.firms[1] = &firm2;
    w.space = &space;
    w.grid = &grid;
    w.mode = config.mode;
    w.dec = DecisionVector::zero(n, d);

    double tbr0 = config.tbr_init;
    if (config.tbr_policy == TbrPolicy::FrozenFirm1) tbr0 = 1.0;
    if (config.tbr_policy == TbrPolicy::FrozenFirm2) tbr0 = 0.0;
    w.dec.tbr = TieBreakRule::constant(n, tbr0);
    w.dec.beta1 = bootstrap_direction(firm1, space);
    w.dec.beta2 = bootstrap_direction(firm2, space);
    w.refresh();

    PlannerResult res;
    res.initial_risk[0] = evaluate(firm1.risk, space, firm1.endowment);
    res.initial_risk[1] = evaluate(firm2.risk, space, firm2.endowment);
    const double rho_w[2] = {res.initial_risk[0], res.initial_risk[1]};
    res.trace.push_back(w.cur.aggregate);

    std::vector<Block> blocks;
    for (const std::string& name : config.block_order) {
        if (name == "alpha") {
            blocks.push_back({BlockKind::Alpha1, "alpha1", config.cube_init});
            if (config.mode == ScheduleMode::PerFirm)
                blocks.push_back({BlockKind::Alpha2, "alpha2", config.cube_init});
        } else if (name == "tail") {
            blocks.push_back({BlockKind::Tail1, "tail1", config.cube_init});
            if (config.mode == ScheduleMode::PerFirm)
                blocks.push_back({BlockKind::Tail2, "tail2", config.cube_init});
        } else if (name == "beta1") {
            blocks.push_back({BlockKind::Beta1, "beta1", config.cube_init});
        } else if (name == "beta2") {
            blocks.push_back({BlockKind::Beta2, "beta2", config.cube_init});
        } else if (name == "tbr") {
            if (config.tbr_policy == TbrPolicy::Free)
                blocks.push_back({BlockKind::Tbr, "tbr", config.cube_init});
        } else {
            throw std::invalid_argument("unknown block name: " + name);
        }
    }

    std::size_t flat_sweeps = 0;
    std::size_t restarts_used = 0;
    std::size_t sweep = 0;
    for (; sweep < config.max_iterations; ++sweep) {
        const double before = w.cur.aggregate;
        bool any_active = false;
        for (Block& blk : blocks) {
            if (blk.cube < config.cube_min) continue;
            any_active = true;
            BlockGradients bg = block_gradients(w, blk, config.enforce_ir, rho_w);
            const LpResult lp =
                lp_trust_region(bg.agg, bg.rows, bg.x0, blk.cube, bg.box);
            if (!lp.ok()) {
                blk.cube *= 0.5;
                continue;
            }
            std::vector<double> cand = lp.point;
            if (blk.kind == BlockKind::Beta1 || blk.kind == BlockKind::Beta2) {
                // the linearized moment constraint can overshoot the true one
                const auto m2_violation = [&](const std::vector<double>& z) {
                    return second_moment(space, z) - 1.0;
                };
                if (m2_violation(cand) > 1e-12) {
                    std::vector<double> cgrad(d);
                    double gmean = 0.0;
                    for (std::size_t j = 0; j < d; ++j) {
                        cgrad[j] = 2.0 * space.weight(j) * cand[j];
                        gmean += space.weight(j) * cgrad[j];
                    }
                    for (std::size_t j = 0; j < d; ++j) cgrad[j] -= gmean;  // keep E[Z] = 0
                    const RepairResult rr = feasibility_repair(cand, cgrad, m2_violation);
                    if (rr.ok) {
                        cand = rr.point;
                    } else {
                        const double scale = std::sqrt(second_moment(space, cand));
                        if (scale > 1.0)
                            for (auto& v : cand) v /= scale;
                    }
                }
                const double m = weighted_mean(space, cand);
                for (auto& v : cand) v -= m;  // roundoff cleanup
            }
            Work trial = w;
            write_block(trial, blk, cand);
            trial.refresh();
            const bool ir_ok = !config.enforce_ir ||
                               (trial.cur.firm[0].assessment <= rho_w[0] + 1e-9 &&
                                trial.cur.firm[1].assessment <= rho_w[1] + 1e-9);
            if (ir_ok && trial.cur.aggregate < w.cur.aggregate - 1e-12) {
                w.dec = trial.dec;
                w.cur = trial.cur;
                blk.cube = std::min(blk.cube * 2.0, config.cube_init);
            } else {
                blk.cube *= 0.5;
            }
        }
        res.trace.push_back(w.cur.aggregate);
        const double improvement = before - w.cur.aggregate;
        // stall detection is deliberately coarser than the convergence
        // tolerance: a trickle of sub-1e-7 gains should not postpone the
        // escape indefinitely
        const double stall_tol = std::max(config.tolerance, 1e-7);
        const bool flat = improvement < stall_tol * (1.0 + std::abs(w.cur.aggregate));
        if (flat) ++flat_sweeps;
        else flat_sweeps = 0;
        if (!any_active || flat_sweeps >= config.patience) {
            if (restarts_used >= config.max_restarts) break;
            ++restarts_used;
            flat_sweeps = 0;
            // Stall escape: the per-block steps pin at kink configurations
            // where improving needs the trade scale and the hedges to move
            // together. Rescale the schedule and re-optimize both hedges
            // along a fixed ladder, keeping the best improving point.
            Work best_trial = w;
            bool escaped = false;
            const auto consider = [&](Work trial) {
                trial.refresh();
                trial.dec.beta1 = optimal_hedge(firm1.risk, space, firm1.endowment,
                                                trial.cur.firm[0].aggregator)
                                      .payoffs;
                trial.dec.beta2 = optimal_hedge(firm2.risk, space, firm2.endowment,
                                                trial.cur.firm[1].aggregator)
                                      .payoffs;
                trial.refresh();
                const bool ir_ok = !config.enforce_ir ||
                                   (trial.cur.firm[0].assessment <= rho_w[0] + 1e-9 &&
                                    trial.cur.firm[1].assessment <= rho_w[1] + 1e-9);
                if (ir_ok && trial.cur.aggregate < best_trial.cur.aggregate - 1e-12) {
                    best_trial = std::move(trial);
                    escaped = true;
                }
            };
            for (double scale : {0.5, 0.7, 0.85, 1.15, 1.4, 1.8, 2.4, 3.0}) {
                Work trial = w;
                for (auto& av : trial.dec.schedule1.alpha) av *= scale;
                trial.dec.schedule1.tail_slope *= scale;
                if (config.mode == ScheduleMode::PerFirm) {
                    for (auto& av : trial.dec.schedule2.alpha) av *= scale;
                    trial.dec.schedule2.tail_slope *= scale;
                } else {
                    trial.dec.schedule2 = trial.dec.schedule1;
                }
                consider(std::move(trial));
            }
            if (config.mode == ScheduleMode::PerFirm) {
                // a firm strictly undercut everywhere sees a zero gradient;
                // matching the winner's schedule restores the tie region so
                // the rule block can redistribute the market
                Work tie1 = w;
                tie1.dec.schedule2 = tie1.dec.schedule1;
                consider(std::move(tie1));
                Work tie2 = w;
                tie2.dec.schedule1 = tie2.dec.schedule2;
                consider(std::move(tie2));
            }
            if (escaped) {
                w = best_trial;
                res.trace.back() = w.cur.aggregate;
            }
            for (Block& blk : blocks) blk.cube = config.cube_init;
        }
    }
    res.iterations = sweep;

    // Post-pass: the relaxed second-moment constraint should bind at an
    // optimum; when slack, rescaling beta to unit second moment is applied
    // if it does not worsen the aggregate.
    std::ostringstream log;
    for (int i = 0; i < 2; ++i) {
        std::vector<double>& beta = i == 0 ? w.dec.beta1 : w.dec.beta2;
        const double m2 = second_moment(space, beta);
        if (m2 >= 1.0 - 1e-6) {
            res.variance_binding[i] = true;
            log << "firm" << (i + 1) << ": binding (m2=" << m2 << "); ";
            continue;
        }
        if (m2 < 1e-14 || w.cur.firm[i].aggregator <= 0.0) {
            log << "firm" << (i + 1) << ": no trade; ";
            continue;
        }
        Work trial = w;
        std::vector<double>& tb = i == 0 ? trial.dec.beta1 : trial.dec.beta2;
        const double scale = std::sqrt(m2);
        for (auto& v : tb) v /= scale;
        trial.refresh();
        const bool ir_ok = !config.enforce_ir ||
                           (trial.cur.firm[0].assessment <= rho_w[0] + 1e-9 &&
                            trial.cur.firm[1].assessment <= rho_w[1] + 1e-9);
        if (ir_ok && trial.cur.aggregate <= w.cur.aggregate + 1e-12) {
            w.dec = trial.dec;
            w.cur = trial.cur;
            res.variance_binding[i] = true;
            log << "firm" << (i + 1) << ": slack (m2=" << m2 << "), rescale applied; ";
        } else {
            log << "firm" << (i + 1) << ": slack (m2=" << m2 << "), rescale rejected; ";
        }
    }
    res.variance_post_pass = log.str();

    res.decision = w.dec;
    res.firm[0] = w.cur.firm[0];
    res.firm[1] = w.cur.firm[1];
    res.aggregate = w.cur.aggregate;
    if (res.trace.back() != res.aggregate) res.trace.push_back(res.aggregate);
    res.ir_satisfied[0] = w.cur.firm[0].assessment <= rho_w[0] + 1e-9;
    res.ir_satisfied[1] = w.cur.firm[1].assessment <= rho_w[1] + 1e-9;

    if (firm1.risk.kind == RiskKind::Entropic && firm2.risk.kind == RiskKind::Entropic &&
        config.mode == ScheduleMode::Shared)
        res.fix_mix_ratio = extract_fix_mix(res, w.dec.schedule1, grid);
    return res;
}

CollinearityReport collinearity_check(const PlannerResult& result, const ProbSpace& space,
                                      const TypeGrid& grid, ScheduleMode mode) {
    (void)mode;  // schedule2 mirrors schedule1 in Shared mode
    CollinearityReport rep;
    for (int i = 0; i < 2; ++i) {
        const UtilitySchedule& sch =
            i == 0 ? result.decision.schedule1 : result.decision.schedule2;
        const auto vals = reconstruct_v(sch, grid);
        const std::vector<double>& beta = i == 0 ? result.decision.beta1 : result.decision.beta2;
        for (std::size_t k = 0; k < grid.cells(); ++k) {
            Claim contract = Claim::zeros(space.atom_count());
            for (std::size_t j = 0; j < space.atom_count(); ++j)
                contract[j] = vals.slope[k] * beta[j];
            rep.max_mean_residual =
                std::max(rep.max_mean_residual, std::abs(mean(space, contract)));
            // Var[X(theta)] = -v'(theta) holds exactly only where the
            // second-moment constraint binds; elsewhere the check is vacuous.
            if (result.variance_binding[i])
                rep.max_variance_residual =
                    std::max(rep.max_variance_residual,
                             std::abs(variance(space, contract) + vals.v_prime[k]));
        }
    }
    return rep;
}

namespace {

/// Phi(Z) = -(Y - E[Y]) / Std(Y) with Y = exp(-gamma (W - a Z)), evaluated
/// with a max shift so the normalization survives extreme exponents.
bool entropic_phi(const FirmSpec& firm, const ProbSpace& space, double a_i, const Claim& Z,
                  Claim& out) {
    const double gamma = firm.risk.risk_aversion;
    const std::size_t dd = space.atom_count();
    double m = -1e300;
    std::vector<double> e(dd);
    for (std::size_t j = 0; j < dd; ++j) {
        e[j] = -gamma * (firm.endowment[j] - a_i * Z[j]);
        m = std::max(m, e[j]);
    }
    double ey = 0.0;
    for (std::size_t j = 0; j < dd; ++j) {
        e[j] = std::exp(e[j] - m);
        ey += space.weight(j) * e[j];
    }
    double var = 0.0;
    for (std::size_t j = 0; j < dd; ++j)
        var += space.weight(j) * (e[j] - ey) * (e[j] - ey);
    if (var <= 1e-20 * ey * ey) return false;  // constant position, Z = 0 convention
    const double sd = std::sqrt(var);
    for (std::size_t j = 0; j < dd; ++j) out[j] = -(e[j] - ey) / sd;
    return true;
}

}  // namespace

double entropic_fixed_point_residual(const FirmSpec& firm, const ProbSpace& space, double a_i,
                                     const Claim& Z) {
    if (firm.risk.kind != RiskKind::Entropic)
        throw std::invalid_argument("fixed-point residual is defined for entropic firms");
    if (a_i < 0.0) throw std::invalid_argument("aggregator must be nonnegative");
    Claim phi = Claim::zeros(space.atom_count());
    const bool nondegenerate = entropic_phi(firm, space, a_i, Z, phi);
    double r = 0.0;
    for (std::size_t j = 0; j < space.atom_count(); ++j)
        r = std::max(r, std::abs(Z[j] - (nondegenerate ? phi[j] : 0.0)));
    return r;
}

Claim entropic_fixed_point_solve(const FirmSpec& firm, const ProbSpace& space, double a_i,
                                 std::size_t max_iter, double damping) {
    Claim Z = Claim::zeros(space.atom_count());
    Claim phi = Claim::zeros(space.atom_count());
    for (std::size_t it = 0; it < max_iter; ++it) {
        if (!entropic_phi(firm, space, a_i, Z, phi)) return Claim::zeros(space.atom_count());
        double delta = 0.0;
        for (std::size_t j = 0; j < Z.size(); ++j) {
            const double nz = (1.0 - damping) * Z[j] + damping * phi[j];
            delta = std::max(delta, std::abs(nz - Z[j]));
            Z[j] = nz;
        }
        if (delta < 1e-14) break;
    }
    return Z;
}

std::optional<double> extract_fix_mix(const PlannerResult& result, const UtilitySchedule& v_upper,
                                      const TypeGrid& grid) {
    const auto vals = reconstruct_v(v_upper, grid);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < grid.cells(); ++k) {
        num += vals.slope[k] * result.decision.tbr.weights[k] * grid.cell_weight(k);
        den += vals.slope[k] * grid.cell_weight(k);
    }
    if (den <= 0.0) return std::nullopt;
    return num / den;
}

TransferSea transfer_sea(const PlannerResult& result, const FirmSpec& firm1,
                         const FirmSpec& firm2, const ProbSpace& space) {
    TransferSea t;
    const double rho1 = evaluate(firm1.risk, space, firm1.endowment);
    const double rho2 = evaluate(firm2.risk, space, firm2.endowment);
    t.rent = rho1 + rho2 - result.aggregate;
    t.lower = result.firm[0].assessment - rho1;   // T >= A_1 - rho_1(W_1)
    t.upper = rho2 - result.firm[1].assessment;   // T <= rho_2(W_2) - A_2
    if (t.rent < -1e-9) return t;                 // cannot happen at an optimum
    t.t_star = 0.5 * (t.lower + t.upper);
    return t;
}

}  // namespace riskshare
