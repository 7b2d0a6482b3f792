#pragma once

#include <string>
#include <vector>

#include "riskshare/catalogue.hpp"
#include "riskshare/lp.hpp"
#include "riskshare/scenario.hpp"

namespace riskshare {

/// Result of one independent-oracle comparison suite.
struct OracleReport {
    std::string suite;
    bool passed = false;
    double worst_residual = 0.0;
    std::vector<std::string> lines;
};

std::vector<std::string> oracle_suite_names();
OracleReport run_oracle(const std::string& suite);

// --- individual oracle routes, exposed for tests and the benchmark ---

struct BruteForceResult {
    double best = 0.0;
    double s0 = 0.0, s1 = 0.0, z1 = 0.0, z2 = 0.0, K = 0.0;
    bool interior = false;  // argmin off the search-box boundary
};

/// Exhaustive grid search on the tiny 2-atom/2-cell instance over the
/// reduced (s0, s1, z1, z2, K) parametrization. Self-contained: rebuilds the
/// schedule and the entropic objective from scratch.
BruteForceResult tiny_brute_force_search(const Scenario& tiny, std::size_t resolution,
                                         double s_max, Exec exec);

/// All equal-support mixed equilibria of a bimatrix with up to 3x3 entries,
/// by support enumeration and exact linear solves.
struct SupportEquilibrium {
    std::vector<double> x, y;
    bool pure = false;
};
std::vector<SupportEquilibrium> support_enumeration(const PayoffTable& table);

/// Independent AV@R route: the variational form min_m m + E[(-X-m)+]/lambda,
/// scanned over all loss levels (exact on finite spaces).
double avar_variational(double lambda, const ProbSpace& space, const Claim& x);

/// Exhaustive active-set LP oracle for small instances.
struct LpOracleResult {
    bool feasible = false;
    double objective = 0.0;
};
LpOracleResult lp_enumeration_oracle(const std::vector<double>& cost,
                                     const std::vector<LinearConstraint>& constraints,
                                     const BoxBounds& box);

}  // namespace riskshare
