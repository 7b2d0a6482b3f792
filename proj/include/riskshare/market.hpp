#pragma once

#include <cstddef>
#include <vector>

#include "riskshare/prob_space.hpp"

namespace riskshare {

/// Indirect-utility schedule in the slope parametrization.
///
/// alpha[k] >= 0 is the per-cell value of -d/dtheta sqrt(-v'), tail_slope
/// is sqrt(-v'(1)) >= 0. Every such pair reconstructs a v that is convex,
/// nonincreasing, nonnegative with v(1) = 0; no global convexity
/// constraints are needed.
struct UtilitySchedule {
    std::vector<double> alpha;
    double tail_slope = 0.0;

    UtilitySchedule() = default;
    UtilitySchedule(std::vector<double> a, double tail) : alpha(std::move(a)), tail_slope(tail) {}
    static UtilitySchedule zero(std::size_t n) {
        return UtilitySchedule(std::vector<double>(n, 0.0), 0.0);
    }
    bool valid() const;

    /// Flat-array serialization for the optimizer: alpha..., tail_slope.
    std::vector<double> to_flat() const;
    static UtilitySchedule from_flat(const std::vector<double>& flat);
};

/// Cell-midpoint values of the reconstructed schedule.
struct ScheduleValues {
    std::vector<double> slope;    // sqrt(-v') at midpoints, nonincreasing
    std::vector<double> v_prime;  // v' = -slope^2
    std::vector<double> v;        // v at midpoints, v(1) = 0 off the right end
};

/// Per-type split weights for firm 1; firm 2's share is 1 - weights.
struct TieBreakRule {
    std::vector<double> weights;

    TieBreakRule() = default;
    explicit TieBreakRule(std::vector<double> w) : weights(std::move(w)) {}
    static TieBreakRule constant(std::size_t n, double c) {
        return TieBreakRule(std::vector<double>(n, c));
    }
    bool valid() const;
    double firm_share(int firm, std::size_t cell) const {
        return firm == 0 ? weights[cell] : 1.0 - weights[cell];
    }
};

struct MarketSegmentation {
    std::vector<std::size_t> theta0;  // tie cells (|v1 - v2| <= tol)
    std::vector<std::size_t> theta1;  // v1 > v2
    std::vector<std::size_t> theta2;  // v2 > v1
    std::vector<double> shift_points; // boundaries where sign(v1 - v2) flips
    std::vector<int> cell_class;      // 0/1/2 per cell, same info flattened
};

/// sqrt(-v'), v' and v at cell midpoints via midpoint sums.
ScheduleValues reconstruct_v(const UtilitySchedule& schedule, const TypeGrid& grid);

/// Nonlinear prices p(theta) = theta v'(theta) - v(theta) at cell midpoints.
std::vector<double> price_schedule(const UtilitySchedule& schedule, const TypeGrid& grid);
std::vector<double> price_schedule(const ScheduleValues& values, const TypeGrid& grid);

/// Default tie tolerance used when callers pass tol <= 0.
double default_tie_tolerance(const ScheduleValues& v1, const ScheduleValues& v2);

/// Classifies each cell by the sign of v1 - v2 at its midpoint. Cells within
/// tol of equality go to theta0, never arbitrarily to a firm.
MarketSegmentation segment_market(const UtilitySchedule& v1, const UtilitySchedule& v2,
                                  const TypeGrid& grid, double tol);

/// Income of a firm serving `share` of each cell under the schedule:
/// sum over cells of (theta v' - v) * share * mu. Nonpositive for valid
/// schedules (the firm pays the agents' information rents).
double firm_income(const UtilitySchedule& schedule, const TypeGrid& grid,
                   const std::vector<double>& share);
double firm_income(const ScheduleValues& values, const TypeGrid& grid,
                   const std::vector<double>& share);

struct EnvelopeReport {
    double max_residual = 0.0;
    std::size_t worst_cell = 0;
};

/// Checks the envelope identity v'(theta) = -Var[X(theta)] for one contract
/// per cell; reports the worst |v' + Var| residual.
EnvelopeReport envelope_check(const UtilitySchedule& schedule, const TypeGrid& grid,
                              const ProbSpace& space, const std::vector<Claim>& contracts);

}  // namespace riskshare
