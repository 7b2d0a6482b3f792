#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "riskshare/market.hpp"
#include "riskshare/prob_space.hpp"

namespace riskshare {

/// A product-price pair; product indexes the grid's enumerated hull.
/// Index 0 is always the zero product, so the null contract is {0, 0.0}.
struct Contract {
    std::size_t product = 0;
    double price = 0.0;
};

/// A finite menu of contracts. The null contract is always present, which
/// keeps the outside option comparable across catalogues.
struct Catalogue {
    std::vector<Contract> contracts;

    static Catalogue null_only() { return Catalogue{{Contract{0, 0.0}}}; }
    bool has_null() const;
};

/// Finite desk-scale skeleton of a firm's strategy space: the convex hull of
/// its basic products sampled on a lattice, a finite price set, and costs
/// sampled at the lattice points (by convex combination of the basic costs).
class CatalogueGrid {
public:
    CatalogueGrid(ProbSpace space, TypeGrid grid,
                  std::vector<Claim> basic1, std::vector<double> cost1,
                  std::vector<Claim> basic2, std::vector<double> cost2,
                  double hull_step, std::vector<double> price_grid);

    const ProbSpace& space() const { return space_; }
    const TypeGrid& grid() const { return grid_; }
    const std::vector<Claim>& products(int firm) const;
    double cost(int firm, std::size_t product) const;
    const std::vector<double>& price_grid() const { return prices_; }
    /// L2 bound over both firms' products (the paper's M).
    double bound() const { return bound_; }

private:
    void build(int firm, const std::vector<Claim>& basics, const std::vector<double>& costs);

    ProbSpace space_;
    TypeGrid grid_;
    std::size_t hull_steps_ = 1;
    std::vector<Claim> products_[2];
    std::vector<double> product_cost_[2];
    std::vector<double> prices_;
    double bound_ = 0.0;
};

struct TypeOutcome {
    double pi1 = 0.0;
    double pi2 = 0.0;
    double v1 = 0.0;
    double v2 = 0.0;
    bool tie = false;  // v1 == v2 within tolerance (and positive)
};

/// Best indirect utility per catalogue for an agent of this type, and each
/// firm's best profit among the contracts attaining it. Agents whose best
/// utility is zero take the outside option; a firm strictly dominated in
/// utility earns nothing from the type.
TypeOutcome per_type_profit(const CatalogueGrid& g, double theta, const Catalogue& c1,
                            const Catalogue& c2);

enum class TbrMode { Efficient, WorstCase, Fixed };

struct PayoffPair {
    double firm1 = 0.0;
    double firm2 = 0.0;
    double aggregate() const { return firm1 + firm2; }
};

/// Integrates per-type profits over the type grid. Efficient mode awards
/// tied types to the larger per-type profit (equal split at exact profit
/// ties); worst-case awards ties against each evaluated firm; fixed mode
/// uses the supplied rule on tied types.
PayoffPair payoff(const CatalogueGrid& g, const Catalogue& c1, const Catalogue& c2,
                  TbrMode mode, const TieBreakRule* fixed_rule = nullptr);

/// The uniform payoff-security transform: keep contracts that survive an
/// eps price cut above cost, plus the null contract. Prices leave the grid.
Catalogue epsilon_shift(const CatalogueGrid& g, int firm, const Catalogue& cat, double eps);

/// Deterministic strategy family: the null-only catalogue, all singleton
/// menus over (product, price), and optionally all two-contract menus.
/// Throws std::length_error when the family would exceed cap.
std::vector<Catalogue> enumerate_catalogues(const CatalogueGrid& g, int firm, std::size_t cap,
                                            int menu_size = 1);

struct PayoffTable {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> pi1;  // row-major
    std::vector<double> pi2;

    double p1(std::size_t r, std::size_t c) const { return pi1[r * cols + c]; }
    double p2(std::size_t r, std::size_t c) const { return pi2[r * cols + c]; }
};

enum class Exec { Serial, Parallel };

/// Efficient-TBR payoff bimatrix over two strategy families. Cells are
/// independent; the parallel path splits them across OpenMP threads and is
/// bit-identical to the serial reference.
PayoffTable payoff_table(const CatalogueGrid& g, const std::vector<Catalogue>& fam1,
                         const std::vector<Catalogue>& fam2, TbrMode mode, Exec exec);

struct MixedProfile {
    std::vector<double> probabilities;
};

struct NashResult {
    MixedProfile profile1;
    MixedProfile profile2;
    double eps = 0.0;  // max best-response gain over both firms
    std::size_t iterations = 0;
    bool certified = false;
};

/// Fictitious play on a bimatrix; the certificate is recomputed from the
/// returned profile. When rounding the empirical play to its modal pure
/// strategies certifies a smaller eps, the purified profile is returned.
NashResult fictitious_play(const PayoffTable& table, std::size_t iterations, double threshold);

struct NashConfig {
    std::size_t iterations = 100000;
    double threshold = 0.01;
    int menu_size = 1;
    unsigned long seed = 1;  // reserved for randomized variants
};

/// Enumerate catalogue families, build the efficient-TBR payoff table and
/// search for a mixed equilibrium.
NashResult mixed_nash(const CatalogueGrid& g, std::size_t enumeration_cap,
                      const NashConfig& config, PayoffTable* table_out = nullptr,
                      Exec exec = Exec::Parallel);

}  // namespace riskshare
