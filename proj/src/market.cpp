#include "riskshare/market.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace riskshare {

bool UtilitySchedule::valid() const {
    if (tail_slope < 0.0) return false;
    for (double a : alpha)
        if (a < 0.0) return false;
    return true;
}

std::vector<double> UtilitySchedule::to_flat() const {
    std::vector<double> flat = alpha;
    flat.push_back(tail_slope);
    return flat;
}

UtilitySchedule UtilitySchedule::from_flat(const std::vector<double>& flat) {
    if (flat.empty()) throw std::invalid_argument("flat schedule array is empty");
    UtilitySchedule s;
    s.alpha.assign(flat.begin(), flat.end() - 1);
    s.tail_slope = flat.back();
    return s;
}

bool TieBreakRule::valid() const {
    for (double w : weights)
        if (w < 0.0 || w > 1.0) return false;
    return true;
}

ScheduleValues reconstruct_v(const UtilitySchedule& schedule, const TypeGrid& grid) {
    const std::size_t n = grid.cells();
    if (schedule.alpha.size() != n)
        throw std::invalid_argument("schedule alpha length does not match grid");
    if (!schedule.valid()) throw std::invalid_argument("schedule violates nonnegativity");
    const double h = grid.cell_width();
    ScheduleValues out;
    out.slope.resize(n);
    out.v_prime.resize(n);
    out.v.resize(n);
    // slope(theta) = tail + integral of alpha to the right of theta
    double suffix = 0.0;
    for (std::size_t kk = n; kk-- > 0;) {
        out.slope[kk] = schedule.tail_slope + suffix + schedule.alpha[kk] * h * 0.5;
        suffix += schedule.alpha[kk] * h;
    }
    // v(theta) = integral of slope^2 to the right, midpoint sums
    double vsuffix = 0.0;
    for (std::size_t kk = n; kk-- > 0;) {
        const double s2 = out.slope[kk] * out.slope[kk];
        out.v_prime[kk] = -s2;
        out.v[kk] = vsuffix + s2 * h * 0.5;
        vsuffix += s2 * h;
    }
    return out;
}

std::vector<double> price_schedule(const ScheduleValues& values, const TypeGrid& grid) {
    const std::size_t n = grid.cells();
    std::vector<double> p(n);
    for (std::size_t k = 0; k < n; ++k)
        p[k] = grid.midpoint(k) * values.v_prime[k] - values.v[k];
    return p;
}

std::vector<double> price_schedule(const UtilitySchedule& schedule, const TypeGrid& grid) {
    return price_schedule(reconstruct_v(schedule, grid), grid);
}

double default_tie_tolerance(const ScheduleValues& v1, const ScheduleValues& v2) {
    double m = 0.0;
    for (double v : v1.v) m = std::max(m, std::abs(v));
    for (double v : v2.v) m = std::max(m, std::abs(v));
    return 1e-9 * (1.0 + m);
}

MarketSegmentation segment_market(const UtilitySchedule& v1, const UtilitySchedule& v2,
                                  const TypeGrid& grid, double tol) {
    if (v1.alpha.size() != v2.alpha.size())
        throw std::invalid_argument("schedules live on different grids");
    const auto a = reconstruct_v(v1, grid);
    const auto b = reconstruct_v(v2, grid);
    if (tol <= 0.0) tol = default_tie_tolerance(a, b);

    MarketSegmentation seg;
    const std::size_t n = grid.cells();
    seg.cell_class.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double diff = a.v[k] - b.v[k];
        int cls = 0;
        if (diff > tol) cls = 1;
        else if (diff < -tol) cls = 2;
        seg.cell_class[k] = cls;
        if (cls == 0) seg.theta0.push_back(k);
        else if (cls == 1) seg.theta1.push_back(k);
        else seg.theta2.push_back(k);
    }
    // shift points: boundaries between cells whose strict signs disagree
    int prev_sign = 0;
    double prev_boundary = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const int cls = seg.cell_class[k];
        const int sign = cls == 1 ? 1 : (cls == 2 ? -1 : 0);
        if (sign != 0) {
            if (prev_sign != 0 && sign != prev_sign) seg.shift_points.push_back(prev_boundary);
            prev_sign = sign;
        }
        prev_boundary = grid.lower() + static_cast<double>(k + 1) * grid.cell_width();
    }
    return seg;
}

double firm_income(const ScheduleValues& values, const TypeGrid& grid,
                   const std::vector<double>& share) {
    const std::size_t n = grid.cells();
    if (share.size() != n) throw std::invalid_argument("share length does not match grid");
    double income = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        income += (grid.midpoint(k) * values.v_prime[k] - values.v[k]) * share[k] *
                  grid.cell_weight(k);
    return income;
}

double firm_income(const UtilitySchedule& schedule, const TypeGrid& grid,
                   const std::vector<double>& share) {
    return firm_income(reconstruct_v(schedule, grid), grid, share);
}

EnvelopeReport envelope_check(const UtilitySchedule& schedule, const TypeGrid& grid,
                              const ProbSpace& space, const std::vector<Claim>& contracts) {
    if (contracts.size() != grid.cells())
        throw std::invalid_argument("need one contract per grid cell");
    const auto values = reconstruct_v(schedule, grid);
    EnvelopeReport rep;
    for (std::size_t k = 0; k < contracts.size(); ++k) {
        const double resid = std::abs(values.v_prime[k] + variance(space, contracts[k]));
        if (resid > rep.max_residual) {
            rep.max_residual = resid;
            rep.worst_cell = k;
        }
    }
    return rep;
}

}  // namespace riskshare
