#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "riskshare/market.hpp"
#include "riskshare/prob_space.hpp"
#include "riskshare/risk_measure.hpp"

namespace riskshare {

struct FirmSpec {
    Claim endowment;       // W_i
    RiskMeasureSpec risk;  // rho_i
};

/// How the indirect-utility schedule is carried by the optimizer.
///
/// Shared: one schedule for both firms (the upper-envelope program); the
/// tie-breaking rule splits the whole market. PerFirm: each firm carries its
/// own schedule and the market is segmented by v1 vs v2 each evaluation.
enum class ScheduleMode { Shared, PerFirm };

enum class TbrPolicy { Free, FrozenFirm1, FrozenFirm2 };

/// Full optimizer state. beta_i plays the role of the normalized claim Z_i;
/// the per-type contracts are sqrt(-v_i') * beta_i.
struct DecisionVector {
    UtilitySchedule schedule1;
    UtilitySchedule schedule2;   // mirrors schedule1 in Shared mode
    std::vector<double> beta1;   // length d, weighted mean 0, second moment <= 1
    std::vector<double> beta2;
    TieBreakRule tbr;

    static DecisionVector zero(std::size_t n, std::size_t d);
    /// Throws when a structural invariant is violated (tolerances 1e-10).
    void validate(const ProbSpace& space) const;
};

struct FirmOutcome {
    double aggregator = 0.0;  // a_i = sum sqrt(-v') f_i mu
    double income = 0.0;      // I_i <= 0
    double risk = 0.0;        // R_i = rho_i(W_i - a_i Z_i)
    double assessment = 0.0;  // A_i = R_i - I_i
};

/// One evaluation of the planner objective at a decision.
struct Assembly {
    FirmOutcome firm[2];
    double aggregate = 0.0;
    ScheduleValues values1;
    ScheduleValues values2;
    std::vector<double> share1;  // effective per-cell share of firm 1
    MarketSegmentation segmentation;  // PerFirm mode only
};

struct PlannerConfig {
    std::size_t max_iterations = 1500;  // full block sweeps
    double cube_init = 0.25;
    double cube_min = 1e-7;
    double tolerance = 1e-10;  // relative per-sweep improvement
    std::size_t patience = 40; // sweeps below tolerance before a restart
    /// On a stall every block cube resets to cube_init; useful descent often
    /// resumes from the new point (the kinks of AV@R stop single blocks, not
    /// the sweep). The iteration budget still bounds the total work.
    std::size_t max_restarts = 8;
    unsigned long seed = 1;
    ScheduleMode mode = ScheduleMode::Shared;
    TbrPolicy tbr_policy = TbrPolicy::Free;
    double tbr_init = 0.5;
    bool enforce_ir = true;
    /// Block sweep order; defaults to alpha, tail, beta1, beta2, tbr.
    std::vector<std::string> block_order = {"alpha", "tail", "beta1", "beta2", "tbr"};
};

struct PlannerResult {
    DecisionVector decision;
    double initial_risk[2] = {0.0, 0.0};  // rho_i(W_i)
    FirmOutcome firm[2];
    double aggregate = 0.0;
    std::optional<double> fix_mix_ratio;
    bool ir_satisfied[2] = {true, true};
    std::size_t iterations = 0;
    std::vector<double> trace;  // accepted aggregate per sweep, trace[0] = no-trade
    bool variance_binding[2] = {false, false};
    std::string variance_post_pass;  // what the slack-variance repair did
};

/// Evaluates risks, incomes and assessments at a decision.
/// In Shared mode schedule1 is used for both firms and every cell is tied.
Assembly assemble_objective(const FirmSpec& firm1, const FirmSpec& firm2,
                            const DecisionVector& decision, const ProbSpace& space,
                            const TypeGrid& grid, ScheduleMode mode);

/// Hybrid block descent of the aggregate assessment: per block, the
/// objective and active constraints are linearized at the current point and
/// minimized over a cube around it; infeasible or non-improving steps halve
/// the block's cube. Deterministic for a fixed config.
PlannerResult solve(const FirmSpec& firm1, const FirmSpec& firm2, const ProbSpace& space,
                    const TypeGrid& grid, const PlannerConfig& config);

struct RepairResult {
    bool ok = false;
    std::vector<double> point;
    int backtracks = 0;
};

/// Line search from `point` along minus the violated constraint's gradient
/// until `max_violation` reports feasibility (<= tol), expanding the step a
/// bounded number of times. Used as the backstop when an LP step overshoots
/// the linearized feasible set.
RepairResult feasibility_repair(const std::vector<double>& point,
                                const std::vector<double>& violated_gradient,
                                const std::function<double(const std::vector<double>&)>& max_violation,
                                int max_backtracks = 40, double tol = 1e-12);

struct CollinearityReport {
    double max_mean_residual = 0.0;
    double max_variance_residual = 0.0;
};

/// Rebuilds the per-type contracts sqrt(-v_i'(theta)) * Z_i and checks the
/// moment structure: mean zero, Var = -v_i'(theta) per cell (exact when the
/// second-moment constraint binds).
CollinearityReport collinearity_check(const PlannerResult& result, const ProbSpace& space,
                                      const TypeGrid& grid, ScheduleMode mode);

/// Sup-norm residual || Z - Phi(Z) || of the entropic stationarity equation
///   Phi(Z) = -(Y - E[Y]) / Std(Y),  Y = exp(-gamma (W - a Z)).
/// Degenerate positions (Std(Y) = 0) fall back to the Z = 0 convention.
double entropic_fixed_point_residual(const FirmSpec& firm, const ProbSpace& space, double a_i,
                                     const Claim& Z);

/// Damped fixed-point iteration on Phi; the oracle route to a stationary Z.
Claim entropic_fixed_point_solve(const FirmSpec& firm, const ProbSpace& space, double a_i,
                                 std::size_t max_iter = 5000, double damping = 0.3);

/// argmin over {E[Z] = 0, E[Z^2] <= 1} of rho(W - a Z) for one firm.
/// Entropic firms use the damped fixed point; AV@R firms solve the
/// epigraph form (the tail max becomes linear rows, so kinks do not
/// blind the step) by trust-region LP iterations on the ball constraint.
Claim optimal_hedge(const RiskMeasureSpec& risk, const ProbSpace& space, const Claim& endowment,
                    double a);

/// K = (integral of sqrt(-v') f dmu) / (integral of sqrt(-v') dmu) for the
/// upper-envelope schedule; absent when the denominator vanishes (no trade).
std::optional<double> extract_fix_mix(const PlannerResult& result, const UtilitySchedule& v_upper,
                                      const TypeGrid& grid);

struct TransferSea {
    double rent = 0.0;
    std::optional<double> t_star;  // midpoint of the feasible transfer interval
    double lower = 0.0;            // interval endpoints
    double upper = 0.0;
};

/// Rent of risk exchange r = sum rho_i(W_i) - aggregate, and a cash transfer
/// making both post-transfer assessments individually rational.
TransferSea transfer_sea(const PlannerResult& result, const FirmSpec& firm1,
                         const FirmSpec& firm2, const ProbSpace& space);

}  // namespace riskshare
