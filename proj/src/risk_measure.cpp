#include "riskshare/risk_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace riskshare {

RiskMeasureSpec RiskMeasureSpec::entropic(double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("entropic risk aversion must be positive");
    RiskMeasureSpec s;
    s.kind = RiskKind::Entropic;
    s.risk_aversion = gamma;
    return s;
}

RiskMeasureSpec RiskMeasureSpec::avar(double lambda) {
    if (!(lambda > 0.0) || lambda > 1.0)
        throw std::invalid_argument("AV@R tail level must lie in (0, 1]");
    RiskMeasureSpec s;
    s.kind = RiskKind::AvgValueAtRisk;
    s.tail_level = lambda;
    return s;
}

std::string RiskMeasureSpec::describe() const {
    std::ostringstream os;
    if (kind == RiskKind::Entropic)
        os << "entropic(gamma=" << risk_aversion << ")";
    else
        os << "avar(lambda=" << tail_level << ")";
    return os.str();
}

namespace {

double entropic_value(double gamma, const ProbSpace& space, const Claim& x) {
    // log-sum-exp with max shift
    double m = -1e300;
    for (std::size_t k = 0; k < x.size(); ++k) m = std::max(m, -gamma * x[k]);
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k)
        s += space.weight(k) * std::exp(-gamma * x[k] - m);
    return (m + std::log(s)) / gamma;
}

/// Mass each atom contributes to the lambda-tail, ordered by loss descending
/// (stable by index, which fixes the selection at ties).
std::vector<double> avar_tail_mass(double lambda, const ProbSpace& space, const Claim& x) {
    const std::size_t d = x.size();
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return -x[i] > -x[j]; });
    std::vector<double> mass(d, 0.0);
    double acc = 0.0;
    for (std::size_t j : order) {
        const double take = std::min(space.weight(j), lambda - acc);
        if (take <= 0.0) break;
        mass[j] = take;
        acc += take;
    }
    return mass;
}

double avar_value(double lambda, const ProbSpace& space, const Claim& x) {
    const auto mass = avar_tail_mass(lambda, space, x);
    double v = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) v += mass[k] * (-x[k]);
    return v / lambda;
}

void check(const RiskMeasureSpec& spec, const ProbSpace& space, const Claim& x) {
    if (x.size() != space.atom_count())
        throw std::invalid_argument("position dimension does not match probability space");
    if (spec.kind == RiskKind::Entropic && !(spec.risk_aversion > 0.0))
        throw std::invalid_argument("entropic risk aversion must be positive");
    if (spec.kind == RiskKind::AvgValueAtRisk &&
        (!(spec.tail_level > 0.0) || spec.tail_level > 1.0))
        throw std::invalid_argument("AV@R tail level must lie in (0, 1]");
}

}  // namespace

double evaluate(const RiskMeasureSpec& spec, const ProbSpace& space, const Claim& position) {
    check(spec, space, position);
    if (spec.kind == RiskKind::Entropic)
        return entropic_value(spec.risk_aversion, space, position);
    return avar_value(spec.tail_level, space, position);
}

Claim subgradient(const RiskMeasureSpec& spec, const ProbSpace& space, const Claim& position) {
    check(spec, space, position);
    const std::size_t d = position.size();
    Claim g = Claim::zeros(d);
    if (spec.kind == RiskKind::Entropic) {
        const double gamma = spec.risk_aversion;
        double m = -1e300;
        for (std::size_t k = 0; k < d; ++k) m = std::max(m, -gamma * position[k]);
        double denom = 0.0;
        std::vector<double> e(d);
        for (std::size_t k = 0; k < d; ++k) {
            e[k] = space.weight(k) * std::exp(-gamma * position[k] - m);
            denom += e[k];
        }
        for (std::size_t k = 0; k < d; ++k) g[k] = -e[k] / denom;
    } else {
        const auto mass = avar_tail_mass(spec.tail_level, space, position);
        for (std::size_t k = 0; k < d; ++k) g[k] = -mass[k] / spec.tail_level;
    }
    return g;
}

namespace {

void record(AxiomReport& rep, const std::string& axiom, const std::string& witness, double mag) {
    rep.violations.push_back({axiom, witness, mag});
}

std::string pair_tag(std::size_t i, std::size_t j) {
    std::ostringstream os;
    os << "samples[" << i << "], samples[" << j << "]";
    return os.str();
}

bool uniform_weights(const ProbSpace& space) {
    const double u = 1.0 / static_cast<double>(space.atom_count());
    for (double w : space.weights())
        if (std::abs(w - u) > 1e-14) return false;
    return true;
}

}  // namespace

AxiomReport axiom_battery(const RiskMeasureSpec& spec, const ProbSpace& space,
                          const std::vector<Claim>& samples) {
    if (samples.size() < 2)
        throw std::invalid_argument("axiom battery needs at least 2 sample claims");
    AxiomReport rep;
    const double tol = 1e-9;
    const std::size_t d = space.atom_count();

    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Claim& X = samples[i];
        const double rx = evaluate(spec, space, X);

        // cash invariance: rho(X + m) = rho(X) - m
        for (double m : {1.0, -2.5}) {
            Claim shifted = X;
            for (auto& v : shifted.payoffs) v += m;
            const double r = evaluate(spec, space, shifted);
            if (std::abs(r - (rx - m)) > tol)
                record(rep, "cash_invariance", pair_tag(i, i), std::abs(r - (rx - m)));
            ++rep.checks;
        }

        // law invariance: permuting atoms of a uniform space leaves rho unchanged
        if (uniform_weights(space)) {
            Claim rotated = X;
            std::rotate(rotated.payoffs.begin(), rotated.payoffs.begin() + 1,
                        rotated.payoffs.end());
            Claim reversed = X;
            std::reverse(reversed.payoffs.begin(), reversed.payoffs.end());
            for (const Claim& perm : {rotated, reversed}) {
                const double r = evaluate(spec, space, perm);
                if (std::abs(r - rx) > tol)
                    record(rep, "law_invariance", pair_tag(i, i), std::abs(r - rx));
                ++rep.checks;
            }
        }

        // positive homogeneity (coherent AV@R only)
        if (spec.kind == RiskKind::AvgValueAtRisk) {
            for (double t : {1.0, 1.5, 3.0}) {
                Claim scaled = X;
                for (auto& v : scaled.payoffs) v *= t;
                const double r = evaluate(spec, space, scaled);
                if (std::abs(r - t * rx) > tol * (1.0 + std::abs(t * rx)))
                    record(rep, "positive_homogeneity", pair_tag(i, i), std::abs(r - t * rx));
                ++rep.checks;
            }
        }

        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            const Claim& Y = samples[j];
            const double ry = evaluate(spec, space, Y);

            // monotonicity on the dominating pair max(X,Y) >= X
            Claim upper = X;
            for (std::size_t k = 0; k < d; ++k) upper[k] = std::max(X[k], Y[k]);
            const double ru = evaluate(spec, space, upper);
            if (ru > rx + tol) record(rep, "monotonicity", pair_tag(i, j), ru - rx);
            if (ru > ry + tol) record(rep, "monotonicity", pair_tag(j, i), ru - ry);
            rep.checks += 2;

            // convexity
            for (double t : {0.25, 0.5, 0.75}) {
                Claim mix = Claim::zeros(d);
                for (std::size_t k = 0; k < d; ++k) mix[k] = t * X[k] + (1.0 - t) * Y[k];
                const double rm = evaluate(spec, space, mix);
                const double bound = t * rx + (1.0 - t) * ry;
                if (rm > bound + tol) record(rep, "convexity", pair_tag(i, j), rm - bound);
                ++rep.checks;
            }
        }
    }
    return rep;
}

}  // namespace riskshare
