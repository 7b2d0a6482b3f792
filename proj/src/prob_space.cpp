#include "riskshare/prob_space.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace riskshare {

namespace {

void check_dims(const ProbSpace& space, const Claim& claim) {
    if (claim.size() != space.atom_count())
        throw std::invalid_argument("claim dimension does not match probability space");
}

}  // namespace

ProbSpace::ProbSpace(std::size_t atom_count)
    : weights_(atom_count, atom_count > 0 ? 1.0 / static_cast<double>(atom_count) : 0.0) {
    if (atom_count < 2) throw std::invalid_argument("ProbSpace needs at least 2 atoms");
}

ProbSpace::ProbSpace(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.size() < 2) throw std::invalid_argument("ProbSpace needs at least 2 atoms");
    double sum = 0.0;
    for (double w : weights_) {
        if (!(w > 0.0)) throw std::invalid_argument("atom weights must be strictly positive");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("atom weights must sum to 1");
}

TypeGrid::TypeGrid(double a, std::size_t n) : a_(a), n_(n), h_((1.0 - a) / static_cast<double>(n)) {
    if (!(a > 0.0) || !(a < 1.0)) throw std::invalid_argument("type lower bound must satisfy 0 < a < 1");
    if (n == 0) throw std::invalid_argument("TypeGrid needs at least one cell");
    mu_.assign(n_, h_);
}

TypeGrid::TypeGrid(double a, std::size_t n, std::vector<double> cell_weights)
    : TypeGrid(a, n) {
    if (cell_weights.size() != n_)
        throw std::invalid_argument("cell_weights length does not match cell count");
    for (double m : cell_weights)
        if (!(m > 0.0)) throw std::invalid_argument("cell weights must be strictly positive");
    mu_ = std::move(cell_weights);
}

double TypeGrid::total_mass() const {
    return std::accumulate(mu_.begin(), mu_.end(), 0.0);
}

double mean(const ProbSpace& space, const Claim& claim) {
    check_dims(space, claim);
    double s = 0.0;
    for (std::size_t k = 0; k < claim.size(); ++k) s += space.weight(k) * claim[k];
    return s;
}

double variance(const ProbSpace& space, const Claim& claim) {
    check_dims(space, claim);
    const double m = mean(space, claim);
    double s = 0.0;
    for (std::size_t k = 0; k < claim.size(); ++k) {
        const double c = claim[k] - m;
        s += space.weight(k) * c * c;
    }
    return s < 0.0 ? 0.0 : s;
}

double l2_norm(const ProbSpace& space, const Claim& claim) {
    check_dims(space, claim);
    double s = 0.0;
    for (std::size_t k = 0; k < claim.size(); ++k)
        s += space.weight(k) * claim[k] * claim[k];
    return std::sqrt(s);
}

double mv_utility(const ProbSpace& space, const TypeGrid& grid, double theta,
                  const Claim& claim) {
    if (theta < grid.lower() || theta > 1.0)
        throw std::invalid_argument("agent type outside [a, 1]");
    return mean(space, claim) - theta * variance(space, claim);
}

}  // namespace riskshare
