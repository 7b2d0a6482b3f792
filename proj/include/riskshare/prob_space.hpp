#pragma once

#include <cstddef>
#include <vector>

namespace riskshare {

/// Finite sample space with strictly positive atom weights summing to one.
class ProbSpace {
public:
    /// Uniform space with d atoms.
    explicit ProbSpace(std::size_t atom_count);
    /// Space with explicit weights (validated: positive, sum to 1 within 1e-12).
    explicit ProbSpace(std::vector<double> weights);

    std::size_t atom_count() const { return weights_.size(); }
    const std::vector<double>& weights() const { return weights_; }
    double weight(std::size_t k) const { return weights_[k]; }

    bool operator==(const ProbSpace&) const = default;

private:
    std::vector<double> weights_;
};

/// A payoff vector over the atoms of a ProbSpace.
struct Claim {
    std::vector<double> payoffs;

    Claim() = default;
    explicit Claim(std::vector<double> x) : payoffs(std::move(x)) {}
    static Claim zeros(std::size_t d) { return Claim(std::vector<double>(d, 0.0)); }
    static Claim constant(std::size_t d, double c) { return Claim(std::vector<double>(d, c)); }

    std::size_t size() const { return payoffs.size(); }
    double operator[](std::size_t k) const { return payoffs[k]; }
    double& operator[](std::size_t k) { return payoffs[k]; }
};

/// Uniform discretization of the type interval [a, 1] into n cells.
///
/// Cell weights default to Lebesgue measure (each cell carries its width);
/// scenario files may override them with any positive masses.
class TypeGrid {
public:
    TypeGrid(double a, std::size_t n);
    TypeGrid(double a, std::size_t n, std::vector<double> cell_weights);

    double lower() const { return a_; }
    std::size_t cells() const { return n_; }
    double cell_width() const { return h_; }
    double midpoint(std::size_t k) const { return a_ + (static_cast<double>(k) + 0.5) * h_; }
    const std::vector<double>& cell_weights() const { return mu_; }
    double cell_weight(std::size_t k) const { return mu_[k]; }
    /// Total measure of [a, 1].
    double total_mass() const;

    bool operator==(const TypeGrid&) const = default;

private:
    double a_;
    std::size_t n_;
    double h_;
    std::vector<double> mu_;
};

/// E[X] under the space's atom weights.
double mean(const ProbSpace& space, const Claim& claim);

/// Var[X] = E[X^2] - E[X]^2, clamped at zero against roundoff.
double variance(const ProbSpace& space, const Claim& claim);

double l2_norm(const ProbSpace& space, const Claim& claim);

/// Mean-variance utility U(theta, X) = E[X] - theta Var[X].
/// theta must lie in [grid.lower(), 1].
double mv_utility(const ProbSpace& space, const TypeGrid& grid, double theta,
                  const Claim& claim);

}  // namespace riskshare
