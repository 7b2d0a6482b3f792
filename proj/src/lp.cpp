#include "riskshare/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace riskshare {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-9;
constexpr double kCostTol = 1e-10;

/// Dense bounded-variable simplex working on columns of A (m rows).
/// Variables carry finite or +inf upper bounds; the basis matrix is
/// refactored from scratch every pivot, which is cheap at these sizes and
/// keeps the arithmetic fresh.
class BoundedSimplex {
public:
    BoundedSimplex(std::size_t rows) : m_(rows) {}

    std::size_t add_variable(std::vector<double> column, double lo, double hi, double cost) {
        cols_.push_back(std::move(column));
        lo_.push_back(lo);
        hi_.push_back(hi);
        cost_.push_back(cost);
        at_upper_.push_back(false);
        return cols_.size() - 1;
    }

    void set_rhs(std::vector<double> b) { b_ = std::move(b); }
    void set_basis(std::vector<std::size_t> basis) { basis_ = std::move(basis); }
    void set_cost(std::size_t j, double c) { cost_[j] = c; }
    void fix_variable(std::size_t j) { hi_[j] = lo_[j]; at_upper_[j] = false; }

    double value(std::size_t j) const { return x_[j]; }
    double objective() const {
        double s = 0.0;
        for (std::size_t j = 0; j < cols_.size(); ++j) s += cost_[j] * x_[j];
        return s;
    }
    const std::vector<std::size_t>& basis() const { return basis_; }

    LpStatus run(std::size_t max_pivots = 20000) {
        for (std::size_t pivot = 0; pivot < max_pivots; ++pivot) {
            compute_state();
            std::vector<double> y = dual_prices();
            // Bland: smallest eligible index
            std::size_t enter = cols_.size();
            bool enter_increase = true;
            for (std::size_t j = 0; j < cols_.size(); ++j) {
                if (is_basic(j) || hi_[j] <= lo_[j]) continue;
                double r = cost_[j];
                for (std::size_t i = 0; i < m_; ++i) r -= y[i] * cols_[j][i];
                if (!at_upper_[j] && r < -kCostTol) {
                    enter = j;
                    enter_increase = true;
                    break;
                }
                if (at_upper_[j] && r > kCostTol && std::isfinite(hi_[j])) {
                    enter = j;
                    enter_increase = false;
                    break;
                }
            }
            if (enter == cols_.size()) return LpStatus::Optimal;
            if (!ratio_test(enter, enter_increase)) return LpStatus::Unbounded;
        }
        return LpStatus::Unbounded;  // cycling guard; unreachable with Bland in practice
    }

private:
    bool is_basic(std::size_t j) const {
        return std::find(basis_.begin(), basis_.end(), j) != basis_.end();
    }

    /// Solves B z = rhs by Gaussian elimination with partial pivoting.
    std::vector<double> solve_basis(std::vector<double> rhs, bool transpose) const {
        std::vector<double> M(m_ * m_);
        for (std::size_t c = 0; c < m_; ++c)
            for (std::size_t r = 0; r < m_; ++r)
                M[r * m_ + c] = transpose ? cols_[basis_[r]][c] : cols_[basis_[c]][r];
        std::vector<std::size_t> perm(m_);
        for (std::size_t i = 0; i < m_; ++i) perm[i] = i;
        for (std::size_t k = 0; k < m_; ++k) {
            std::size_t piv = k;
            for (std::size_t r = k + 1; r < m_; ++r)
                if (std::abs(M[r * m_ + k]) > std::abs(M[piv * m_ + k])) piv = r;
            if (piv != k) {
                for (std::size_t c = 0; c < m_; ++c) std::swap(M[k * m_ + c], M[piv * m_ + c]);
                std::swap(rhs[k], rhs[piv]);
            }
            const double d = M[k * m_ + k];
            if (std::abs(d) < 1e-13) continue;  // singular direction; treated as zero
            for (std::size_t r = k + 1; r < m_; ++r) {
                const double f = M[r * m_ + k] / d;
                if (f == 0.0) continue;
                for (std::size_t c = k; c < m_; ++c) M[r * m_ + c] -= f * M[k * m_ + c];
                rhs[r] -= f * rhs[k];
            }
        }
        std::vector<double> z(m_, 0.0);
        for (std::size_t kk = m_; kk-- > 0;) {
            double s = rhs[kk];
            for (std::size_t c = kk + 1; c < m_; ++c) s -= M[kk * m_ + c] * z[c];
            const double d = M[kk * m_ + kk];
            z[kk] = std::abs(d) < 1e-13 ? 0.0 : s / d;
        }
        return z;
    }

    void compute_state() {
        x_.assign(cols_.size(), 0.0);
        std::vector<double> rhs = b_;
        for (std::size_t j = 0; j < cols_.size(); ++j) {
            if (is_basic(j)) continue;
            const double xv = at_upper_[j] ? hi_[j] : lo_[j];
            x_[j] = xv;
            if (xv != 0.0)
                for (std::size_t i = 0; i < m_; ++i) rhs[i] -= cols_[j][i] * xv;
        }
        const std::vector<double> xb = solve_basis(rhs, false);
        for (std::size_t i = 0; i < m_; ++i) x_[basis_[i]] = xb[i];
    }

    std::vector<double> dual_prices() const {
        std::vector<double> cb(m_);
        for (std::size_t i = 0; i < m_; ++i) cb[i] = cost_[basis_[i]];
        return solve_basis(std::move(cb), true);
    }

    bool ratio_test(std::size_t enter, bool increase) {
        const std::vector<double> d = solve_basis(cols_[enter], false);
        double best_t = std::isfinite(hi_[enter]) ? hi_[enter] - lo_[enter] : kInf;
        std::size_t leave = m_;       // m_ means "bound flip"
        bool leave_to_upper = false;
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t bj = basis_[i];
            const double di = increase ? d[i] : -d[i];
            double t = kInf;
            bool to_upper = false;
            if (di > kFeasTol) {
                t = (x_[bj] - lo_[bj]) / di;
            } else if (di < -kFeasTol && std::isfinite(hi_[bj])) {
                t = (hi_[bj] - x_[bj]) / (-di);
                to_upper = true;
            } else {
                continue;
            }
            if (t < best_t - 1e-12 ||
                (t < best_t + 1e-12 && leave != m_ && bj < basis_[leave])) {
                best_t = t;
                leave = i;
                leave_to_upper = to_upper;
            }
        }
        if (!std::isfinite(best_t)) return false;  // unbounded ray
        if (leave == m_) {
            at_upper_[enter] = !at_upper_[enter];  // bound flip
            return true;
        }
        const std::size_t out = basis_[leave];
        at_upper_[out] = leave_to_upper;
        at_upper_[enter] = false;
        basis_[leave] = enter;
        // entering variable's incoming bound state: it becomes basic, its
        // stored bound flag is irrelevant until it leaves again
        if (!increase) at_upper_[enter] = false;
        return true;
    }

    std::size_t m_;
    std::vector<std::vector<double>> cols_;
    std::vector<double> lo_, hi_, cost_;
    std::vector<bool> at_upper_;
    std::vector<double> b_;
    std::vector<std::size_t> basis_;
    std::vector<double> x_;
};

}  // namespace

LpResult solve_lp(const std::vector<double>& cost,
                  const std::vector<LinearConstraint>& constraints, const BoxBounds& box) {
    const std::size_t nv = cost.size();
    if (box.lower.size() != nv || box.upper.size() != nv)
        throw std::invalid_argument("box bounds dimension mismatch");
    for (std::size_t j = 0; j < nv; ++j) {
        if (!std::isfinite(box.lower[j]) || !std::isfinite(box.upper[j]))
            throw std::invalid_argument("solve_lp needs finite variable bounds");
        if (box.lower[j] > box.upper[j] + 1e-15) return {LpStatus::Infeasible, {}, 0.0};
    }
    const std::size_t m = constraints.size();

    LpResult res;
    if (m == 0) {
        // pure box problem
        res.status = LpStatus::Optimal;
        res.point.resize(nv);
        for (std::size_t j = 0; j < nv; ++j)
            res.point[j] = cost[j] > 0.0 ? box.lower[j] : (cost[j] < 0.0 ? box.upper[j] : box.lower[j]);
        res.objective = 0.0;
        for (std::size_t j = 0; j < nv; ++j) res.objective += cost[j] * res.point[j];
        return res;
    }

    BoundedSimplex sx(m);
    double scale = 1.0;
    for (const auto& c : constraints) scale = std::max(scale, std::abs(c.rhs));

    // structural variables, shifted to start at their lower bounds
    for (std::size_t j = 0; j < nv; ++j) {
        std::vector<double> col(m);
        for (std::size_t i = 0; i < m; ++i) {
            if (constraints[i].coeffs.size() != nv)
                throw std::invalid_argument("constraint coefficient dimension mismatch");
            col[i] = constraints[i].coeffs[j];
        }
        sx.add_variable(std::move(col), box.lower[j], box.upper[j], 0.0);
    }
    // slacks for inequalities
    std::vector<std::size_t> slack_of(m, SIZE_MAX);
    for (std::size_t i = 0; i < m; ++i) {
        if (constraints[i].kind == LinearConstraint::Kind::LessEq) {
            std::vector<double> col(m, 0.0);
            col[i] = 1.0;
            slack_of[i] = sx.add_variable(std::move(col), 0.0, kInf, 0.0);
        }
    }
    // phase-1 artificials spanning every row
    std::vector<double> residual(m);
    for (std::size_t i = 0; i < m; ++i) {
        double r = constraints[i].rhs;
        for (std::size_t j = 0; j < nv; ++j) r -= constraints[i].coeffs[j] * box.lower[j];
        residual[i] = r;
    }
    std::vector<std::size_t> art(m);
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> col(m, 0.0);
        col[i] = residual[i] >= 0.0 ? 1.0 : -1.0;
        art[i] = sx.add_variable(std::move(col), 0.0, kInf, 1.0);
        basis[i] = art[i];
    }
    std::vector<double> b(m);
    for (std::size_t i = 0; i < m; ++i) b[i] = constraints[i].rhs;
    sx.set_rhs(std::move(b));
    sx.set_basis(std::move(basis));

    if (sx.run() != LpStatus::Optimal) return {LpStatus::Infeasible, {}, 0.0};
    if (sx.objective() > kFeasTol * (1.0 + scale) * 10.0) return {LpStatus::Infeasible, {}, 0.0};

    // phase 2: pin artificials at zero, restore the real objective
    for (std::size_t i = 0; i < m; ++i) {
        sx.set_cost(art[i], 0.0);
        sx.fix_variable(art[i]);
    }
    for (std::size_t j = 0; j < nv; ++j) sx.set_cost(j, cost[j]);
    const LpStatus st = sx.run();
    if (st != LpStatus::Optimal) return {st, {}, 0.0};

    res.status = LpStatus::Optimal;
    res.point.resize(nv);
    for (std::size_t j = 0; j < nv; ++j) {
        double v = sx.value(j);
        res.point[j] = std::clamp(v, box.lower[j], box.upper[j]);
    }
    res.objective = 0.0;
    for (std::size_t j = 0; j < nv; ++j) res.objective += cost[j] * res.point[j];
    return res;
}

LpResult lp_trust_region(const std::vector<double>& gradient,
                         const std::vector<LinearConstraint>& constraints,
                         const std::vector<double>& cube_center, double cube_half_width,
                         const BoxBounds& box) {
    const std::size_t nv = gradient.size();
    if (cube_center.size() != nv) throw std::invalid_argument("cube center dimension mismatch");
    if (!(cube_half_width > 0.0)) throw std::invalid_argument("cube half-width must be positive");

    BoxBounds eff;
    eff.lower.resize(nv);
    eff.upper.resize(nv);
    for (std::size_t j = 0; j < nv; ++j) {
        const double lo = box.lower.empty() ? -kInf : box.lower[j];
        const double hi = box.upper.empty() ? kInf : box.upper[j];
        eff.lower[j] = std::max(cube_center[j] - cube_half_width, lo);
        eff.upper[j] = std::min(cube_center[j] + cube_half_width, hi);
        if (eff.lower[j] > eff.upper[j] + 1e-15) return {LpStatus::Infeasible, {}, 0.0};
    }

    bool zero_grad = true;
    for (double g : gradient)
        if (std::abs(g) > 0.0) { zero_grad = false; break; }
    if (zero_grad) {
        bool center_ok = true;
        for (const auto& c : constraints) {
            double lhs = 0.0;
            for (std::size_t j = 0; j < nv; ++j) lhs += c.coeffs[j] * cube_center[j];
            const bool ok = c.kind == LinearConstraint::Kind::Eq
                                ? std::abs(lhs - c.rhs) <= 1e-9 * (1.0 + std::abs(c.rhs))
                                : lhs <= c.rhs + 1e-9 * (1.0 + std::abs(c.rhs));
            if (!ok) { center_ok = false; break; }
        }
        for (std::size_t j = 0; j < nv && center_ok; ++j)
            if (cube_center[j] < eff.lower[j] - 1e-12 || cube_center[j] > eff.upper[j] + 1e-12)
                center_ok = false;
        if (center_ok) {
            LpResult r;
            r.status = LpStatus::Optimal;
            r.point = cube_center;
            r.objective = 0.0;
            return r;
        }
    }
    return solve_lp(gradient, constraints, eff);
}

}  // namespace riskshare
