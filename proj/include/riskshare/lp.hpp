#pragma once

#include <cstddef>
#include <vector>

namespace riskshare {

struct LinearConstraint {
    enum class Kind { LessEq, Eq };
    std::vector<double> coeffs;
    double rhs = 0.0;
    Kind kind = Kind::LessEq;

    static LinearConstraint less_eq(std::vector<double> a, double b) {
        return {std::move(a), b, Kind::LessEq};
    }
    static LinearConstraint eq(std::vector<double> a, double b) {
        return {std::move(a), b, Kind::Eq};
    }
};

struct BoxBounds {
    std::vector<double> lower;
    std::vector<double> upper;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> point;
    double objective = 0.0;
    bool ok() const { return status == LpStatus::Optimal; }
};

/// Minimizes cost'x over {lower <= x <= upper} intersected with the given
/// affine constraints. Dense bounded-variable two-phase simplex with Bland's
/// rule; bounds must be finite.
LpResult solve_lp(const std::vector<double>& cost,
                  const std::vector<LinearConstraint>& constraints, const BoxBounds& box);

/// One trust-region subproblem: minimize gradient'x over the cube of the
/// given half-width around cube_center, intersected with the box and the
/// half-spaces/hyperplanes in constraints. Returns the minimizing point.
///
/// A zero gradient returns cube_center when feasible (deterministic choice
/// among the optima). An empty constraint set reports Infeasible; the
/// descent loop reacts by halving the cube.
LpResult lp_trust_region(const std::vector<double>& gradient,
                         const std::vector<LinearConstraint>& constraints,
                         const std::vector<double>& cube_center, double cube_half_width,
                         const BoxBounds& box);

}  // namespace riskshare
