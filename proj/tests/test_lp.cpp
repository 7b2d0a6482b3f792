#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "riskshare/lp.hpp"
#include "riskshare/oracles.hpp"

using namespace riskshare;

TEST_CASE("trust region corner and center cases") {
    const double h = 0.4;
    BoxBounds box;  // empty box = unbounded; the cube does the bounding
    const LpResult corner =
        lp_trust_region({1.0, 1.0}, {}, {0.0, 0.0}, h, box);
    REQUIRE(corner.ok());
    CHECK(corner.point[0] == doctest::Approx(-h));
    CHECK(corner.point[1] == doctest::Approx(-h));

    const LpResult center = lp_trust_region({0.0, 0.0}, {}, {0.3, -0.2}, h, box);
    REQUIRE(center.ok());
    CHECK(center.point[0] == doctest::Approx(0.3));
    CHECK(center.point[1] == doctest::Approx(-0.2));
}

TEST_CASE("infeasible constraint set is signalled") {
    BoxBounds box;
    const std::vector<LinearConstraint> cons = {
        LinearConstraint::less_eq({1.0, 0.0}, -2.0)};  // x0 <= -2 outside the cube
    const LpResult res = lp_trust_region({1.0, 1.0}, cons, {0.0, 0.0}, 0.5, box);
    CHECK(!res.ok());
    CHECK(res.status == LpStatus::Infeasible);
}

TEST_CASE("equalities are honored") {
    BoxBounds box;
    box.lower = {-2.0, -2.0, -2.0};
    box.upper = {2.0, 2.0, 2.0};
    const std::vector<LinearConstraint> cons = {
        LinearConstraint::eq({1.0, 1.0, 1.0}, 1.0)};
    const LpResult res = solve_lp({1.0, 2.0, 3.0}, cons, box);
    REQUIRE(res.ok());
    const double sum = res.point[0] + res.point[1] + res.point[2];
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    // optimum loads the cheap coordinate and shorts the expensive one
    CHECK(res.point[0] == doctest::Approx(2.0));
    CHECK(res.point[2] == doctest::Approx(-2.0));
    CHECK(res.objective == doctest::Approx(-2.0).epsilon(1e-10));
}

TEST_CASE("random instances match the active-set enumeration oracle") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int it = 0; it < 200; ++it) {
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
        for (int i = 0; i < it % 4; ++i) {
            std::vector<double> row(n);
            for (auto& v : row) v = uni(rng);
            cons.push_back(LinearConstraint::less_eq(std::move(row), uni(rng)));
        }
        if (it % 5 == 0) {
            std::vector<double> row(n);
            for (auto& v : row) v = uni(rng);
            cons.push_back(LinearConstraint::eq(std::move(row), 0.2 * uni(rng)));
        }
        const LpResult got = solve_lp(cost, cons, box);
        const LpOracleResult want = lp_enumeration_oracle(cost, cons, box);
        REQUIRE(got.ok() == want.feasible);
        if (got.ok()) CHECK(got.objective == doctest::Approx(want.objective).epsilon(1e-8));
    }
}

TEST_CASE("trust region validation") {
    BoxBounds box;
    CHECK_THROWS_AS(lp_trust_region({1.0}, {}, {0.0, 0.0}, 0.5, box), std::invalid_argument);
    CHECK_THROWS_AS(lp_trust_region({1.0}, {}, {0.0}, -1.0, box), std::invalid_argument);
}
