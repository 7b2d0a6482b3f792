#include "riskshare/catalogue.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace riskshare {

bool Catalogue::has_null() const {
    for (const Contract& c : contracts)
        if (c.product == 0 && c.price == 0.0) return true;
    return false;
}

CatalogueGrid::CatalogueGrid(ProbSpace space, TypeGrid grid, std::vector<Claim> basic1,
                             std::vector<double> cost1, std::vector<Claim> basic2,
                             std::vector<double> cost2, double hull_step,
                             std::vector<double> price_grid)
    : space_(std::move(space)), grid_(std::move(grid)), prices_(std::move(price_grid)) {
    if (basic1.empty() || basic2.empty())
        throw std::invalid_argument("each firm needs at least one basic product");
    if (cost1.size() != basic1.size() || cost2.size() != basic2.size())
        throw std::invalid_argument("one cost per basic product required");
    if (!(hull_step > 0.0) || hull_step > 1.0)
        throw std::invalid_argument("hull step must lie in (0, 1]");
    const double steps = 1.0 / hull_step;
    if (std::abs(steps - std::round(steps)) > 1e-9)
        throw std::invalid_argument("hull step must divide 1");
    hull_steps_ = static_cast<std::size_t>(std::round(steps));

    build(0, basic1, cost1);
    build(1, basic2, cost2);
    for (int firm = 0; firm < 2; ++firm)
        for (const Claim& x : products_[firm])
            bound_ = std::max(bound_, l2_norm(space_, x));
    const double m = std::max(bound_, 1e-12);
    for (double p : prices_)
        if (p > m + 1e-9 || p < -m * m - 1e-9)
            throw std::invalid_argument("price grid leaves the [-M^2, M] band");
}

void CatalogueGrid::build(int firm, const std::vector<Claim>& basics,
                          const std::vector<double>& costs) {
    const std::size_t d = space_.atom_count();
    for (const Claim& x : basics)
        if (x.size() != d)
            throw std::invalid_argument("basic product dimension does not match space");
    auto& prods = products_[firm];
    auto& pcost = product_cost_[firm];
    prods.push_back(Claim::zeros(d));  // index 0: the null product
    pcost.push_back(0.0);

    // lattice of convex weights: k_j / hull_steps_, sum k_j = hull_steps_
    const std::size_t m = basics.size();
    std::vector<std::size_t> k(m, 0);
    k[0] = hull_steps_;
    while (true) {
        Claim x = Claim::zeros(d);
        double c = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double lam = static_cast<double>(k[j]) / static_cast<double>(hull_steps_);
            for (std::size_t q = 0; q < d; ++q) x[q] += lam * basics[j][q];
            c += lam * costs[j];
        }
        prods.push_back(std::move(x));
        pcost.push_back(c);
        // next composition of hull_steps_ into m parts
        std::size_t j = 0;
        while (j + 1 < m && k[j] == 0) ++j;
        if (j + 1 >= m) break;
        const std::size_t v = k[j];
        k[j] = 0;
        k[j + 1] += 1;
        k[0] = v - 1;
    }
}

const std::vector<Claim>& CatalogueGrid::products(int firm) const { return products_[firm]; }

double CatalogueGrid::cost(int firm, std::size_t product) const {
    return product_cost_[firm][product];
}

TypeOutcome per_type_profit(const CatalogueGrid& g, double theta, const Catalogue& c1,
                            const Catalogue& c2) {
    if (!c1.has_null() || !c2.has_null())
        throw std::invalid_argument("catalogues must contain the null contract");
    TypeOutcome out;
    const Catalogue* cats[2] = {&c1, &c2};
    double best_u[2];
    double best_profit[2];
    for (int i = 0; i < 2; ++i) {
        best_u[i] = -1e300;
        best_profit[i] = 0.0;
        // pass 1: the type's best utility in this catalogue
        std::vector<double> util(cats[i]->contracts.size());
        for (std::size_t c = 0; c < cats[i]->contracts.size(); ++c) {
            const Contract& ct = cats[i]->contracts[c];
            util[c] = mv_utility(g.space(), g.grid(), theta, g.products(i)[ct.product]) - ct.price;
            best_u[i] = std::max(best_u[i], util[c]);
        }
        // pass 2: firm's best profit among the attaining contracts
        const double tol = 1e-12 * (1.0 + std::abs(best_u[i]));
        bool first = true;
        for (std::size_t c = 0; c < cats[i]->contracts.size(); ++c) {
            if (util[c] < best_u[i] - tol) continue;
            const Contract& ct = cats[i]->contracts[c];
            const double profit = ct.price - g.cost(i, ct.product);
            if (first || profit > best_profit[i]) best_profit[i] = profit;
            first = false;
        }
    }
    out.v1 = best_u[0];
    out.v2 = best_u[1];
    const double vtol = 1e-12 * (1.0 + std::abs(out.v1) + std::abs(out.v2));
    const bool zero = out.v1 <= vtol && out.v2 <= vtol;  // outside option
    // the null contract keeps a zero term inside the profit max, so a type
    // whose chosen contract loses money still contributes no less than 0
    out.pi1 = (!zero && out.v1 >= out.v2 - vtol) ? std::max(0.0, best_profit[0]) : 0.0;
    out.pi2 = (!zero && out.v2 >= out.v1 - vtol) ? std::max(0.0, best_profit[1]) : 0.0;
    out.tie = !zero && std::abs(out.v1 - out.v2) <= vtol;
    return out;
}

PayoffPair payoff(const CatalogueGrid& g, const Catalogue& c1, const Catalogue& c2,
                  TbrMode mode, const TieBreakRule* fixed_rule) {
    if (mode == TbrMode::Fixed && fixed_rule == nullptr)
        throw std::invalid_argument("fixed TBR mode needs a rule");
    const TypeGrid& grid = g.grid();
    PayoffPair out;
    for (std::size_t k = 0; k < grid.cells(); ++k) {
        const TypeOutcome t = per_type_profit(g, grid.midpoint(k), c1, c2);
        const double mu = grid.cell_weight(k);
        if (!t.tie) {
            // the utility indicator already zeroes the dominated firm
            out.firm1 += t.pi1 * mu;
            out.firm2 += t.pi2 * mu;
            continue;
        }
        switch (mode) {
            case TbrMode::Efficient: {
                const double ptol = 1e-12 * (1.0 + std::abs(t.pi1) + std::abs(t.pi2));
                if (t.pi1 > t.pi2 + ptol) out.firm1 += t.pi1 * mu;
                else if (t.pi2 > t.pi1 + ptol) out.firm2 += t.pi2 * mu;
                else {
                    out.firm1 += 0.5 * t.pi1 * mu;
                    out.firm2 += 0.5 * t.pi2 * mu;
                }
                break;
            }
            case TbrMode::WorstCase:
                break;  // ties resolved against each evaluated firm
            case TbrMode::Fixed: {
                const double f = fixed_rule->weights[k];
                out.firm1 += f * t.pi1 * mu;
                out.firm2 += (1.0 - f) * t.pi2 * mu;
                break;
            }
        }
    }
    return out;
}

Catalogue epsilon_shift(const CatalogueGrid& g, int firm, const Catalogue& cat, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    Catalogue out;
    for (const Contract& c : cat.contracts) {
        const double p = c.price - eps;
        if (p >= g.cost(firm, c.product)) out.contracts.push_back({c.product, p});
    }
    if (!out.has_null()) out.contracts.push_back({0, 0.0});
    return out;
}

std::vector<Catalogue> enumerate_catalogues(const CatalogueGrid& g, int firm, std::size_t cap,
                                            int menu_size) {
    const std::size_t np = g.products(firm).size();
    const std::size_t npr = g.price_grid().size();
    std::vector<Contract> all;
    for (std::size_t p = 1; p < np; ++p)  // skip the null product; it is implied
        for (std::size_t q = 0; q < npr; ++q) all.push_back({p, g.price_grid()[q]});

    std::size_t count = 1 + all.size();
    if (menu_size >= 2) count += all.size() * (all.size() - 1) / 2;
    if (count > cap) throw std::length_error("catalogue enumeration exceeds cap");

    std::vector<Catalogue> fam;
    fam.reserve(count);
    fam.push_back(Catalogue::null_only());
    for (const Contract& c : all) fam.push_back(Catalogue{{Contract{0, 0.0}, c}});
    if (menu_size >= 2)
        for (std::size_t i = 0; i < all.size(); ++i)
            for (std::size_t j = i + 1; j < all.size(); ++j)
                fam.push_back(Catalogue{{Contract{0, 0.0}, all[i], all[j]}});
    return fam;
}

PayoffTable payoff_table(const CatalogueGrid& g, const std::vector<Catalogue>& fam1,
                         const std::vector<Catalogue>& fam2, TbrMode mode, Exec exec) {
    PayoffTable t;
    t.rows = fam1.size();
    t.cols = fam2.size();
    t.pi1.assign(t.rows * t.cols, 0.0);
    t.pi2.assign(t.rows * t.cols, 0.0);
    const std::ptrdiff_t cells = static_cast<std::ptrdiff_t>(t.rows * t.cols);
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 8)
        for (std::ptrdiff_t idx = 0; idx < cells; ++idx) {
            const std::size_t r = static_cast<std::size_t>(idx) / t.cols;
            const std::size_t c = static_cast<std::size_t>(idx) % t.cols;
            const PayoffPair p = payoff(g, fam1[r], fam2[c], mode);
            t.pi1[idx] = p.firm1;
            t.pi2[idx] = p.firm2;
        }
    } else {
        for (std::ptrdiff_t idx = 0; idx < cells; ++idx) {
            const std::size_t r = static_cast<std::size_t>(idx) / t.cols;
            const std::size_t c = static_cast<std::size_t>(idx) % t.cols;
            const PayoffPair p = payoff(g, fam1[r], fam2[c], mode);
            t.pi1[idx] = p.firm1;
            t.pi2[idx] = p.firm2;
        }
    }
    return t;
}

namespace {

double expected_payoff(const PayoffTable& t, bool firm1, const std::vector<double>& x,
                       const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t r = 0; r < t.rows; ++r)
        for (std::size_t c = 0; c < t.cols; ++c)
            s += x[r] * y[c] * (firm1 ? t.p1(r, c) : t.p2(r, c));
    return s;
}

/// eps certificate: best pure deviation gain against the opponent's mix.
double certificate(const PayoffTable& t, const std::vector<double>& x,
                   const std::vector<double>& y) {
    double br1 = -1e300, br2 = -1e300;
    for (std::size_t r = 0; r < t.rows; ++r) {
        double v = 0.0;
        for (std::size_t c = 0; c < t.cols; ++c) v += y[c] * t.p1(r, c);
        br1 = std::max(br1, v);
    }
    for (std::size_t c = 0; c < t.cols; ++c) {
        double v = 0.0;
        for (std::size_t r = 0; r < t.rows; ++r) v += x[r] * t.p2(r, c);
        br2 = std::max(br2, v);
    }
    const double a1 = expected_payoff(t, true, x, y);
    const double a2 = expected_payoff(t, false, x, y);
    return std::max(br1 - a1, br2 - a2);
}

}  // namespace

NashResult fictitious_play(const PayoffTable& table, std::size_t iterations, double threshold) {
    if (table.rows == 0 || table.cols == 0)
        throw std::invalid_argument("empty payoff table");
    std::vector<double> cnt1(table.rows, 0.0), cnt2(table.cols, 0.0);
    // running sums of opponent-play payoffs; best response reads them directly
    std::vector<double> score1(table.rows, 0.0);  // sum over past firm-2 plays of p1(r, c_t)
    std::vector<double> score2(table.cols, 0.0);

    NashResult res;
    res.iterations = iterations;
    res.eps = 1e300;
    std::vector<double> x(table.rows), y(table.cols);
    const std::size_t check_every = std::max<std::size_t>(iterations / 256, 64);

    const auto snapshot = [&](std::size_t played) {
        for (std::size_t rr = 0; rr < table.rows; ++rr)
            x[rr] = cnt1[rr] / static_cast<double>(played);
        for (std::size_t cc = 0; cc < table.cols; ++cc)
            y[cc] = cnt2[cc] / static_cast<double>(played);
        const double eps = certificate(table, x, y);
        if (eps < res.eps) {
            res.eps = eps;
            res.profile1.probabilities = x;
            res.profile2.probabilities = y;
        }
    };

    std::size_t r = 0, c = 0;  // first round: both open with strategy 0
    for (std::size_t it = 0; it < iterations; ++it) {
        cnt1[r] += 1.0;
        cnt2[c] += 1.0;
        for (std::size_t rr = 0; rr < table.rows; ++rr) score1[rr] += table.p1(rr, c);
        for (std::size_t cc = 0; cc < table.cols; ++cc) score2[cc] += table.p2(r, cc);
        r = 0;
        for (std::size_t rr = 1; rr < table.rows; ++rr)
            if (score1[rr] > score1[r] + 1e-15) r = rr;
        c = 0;
        for (std::size_t cc = 1; cc < table.cols; ++cc)
            if (score2[cc] > score2[c] + 1e-15) c = cc;
        // the empirical play can orbit an equilibrium; keep the best-so-far
        // profile rather than whatever the last iteration left behind
        if ((it + 1) % check_every == 0) snapshot(it + 1);
    }
    snapshot(iterations);

    // purification: when some pure pair is an exact equilibrium (its
    // best-response gain is zero) it beats any empirical mixture; scan for
    // the first such pair in index order
    std::vector<double> px(table.rows, 0.0), py(table.cols, 0.0);
    for (std::size_t r = 0; r < table.rows && res.eps > 0.0; ++r) {
        for (std::size_t c = 0; c < table.cols && res.eps > 0.0; ++c) {
            std::fill(px.begin(), px.end(), 0.0);
            std::fill(py.begin(), py.end(), 0.0);
            px[r] = 1.0;
            py[c] = 1.0;
            const double pure_eps = certificate(table, px, py);
            if (pure_eps <= res.eps) {
                res.profile1.probabilities = px;
                res.profile2.probabilities = py;
                res.eps = pure_eps;
            }
        }
    }
    res.certified = res.eps <= threshold;
    return res;
}

NashResult mixed_nash(const CatalogueGrid& g, std::size_t enumeration_cap,
                      const NashConfig& config, PayoffTable* table_out, Exec exec) {
    const auto fam1 = enumerate_catalogues(g, 0, enumeration_cap, config.menu_size);
    const auto fam2 = enumerate_catalogues(g, 1, enumeration_cap, config.menu_size);
    const PayoffTable table = payoff_table(g, fam1, fam2, TbrMode::Efficient, exec);
    if (table_out) *table_out = table;
    return fictitious_play(table, config.iterations, config.threshold);
}

}  // namespace riskshare
