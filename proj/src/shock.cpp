#include "ccfsim/shock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ccfsim/atwood.hpp"

namespace ccfsim {

VictimProbabilities VictimProbabilities::uniform(int n, double rho) {
    if (n < 1) throw DomainError("victim probabilities need at least 1 element");
    if (!(rho >= 0.0 && rho <= 1.0))
        throw DomainError("rho must be in [0, 1], got " + std::to_string(rho));
    VictimProbabilities v;
    v.prob.assign(static_cast<std::size_t>(n), rho);
    return v;
}

namespace {

void check_subset(int n, const std::vector<int>& subset_a) {
    if (n < 2) throw DomainError("directed victim probabilities need at least 2 elements");
    if (subset_a.empty() || static_cast<int>(subset_a.size()) >= n)
        throw DomainError("directed subset must be a proper non-empty subset of the elements");
    if (!std::is_sorted(subset_a.begin(), subset_a.end()) ||
        std::adjacent_find(subset_a.begin(), subset_a.end()) != subset_a.end())
        throw DomainError("directed subset ids must be sorted and unique");
    if (subset_a.front() < 0 || subset_a.back() >= n)
        throw DomainError("directed subset ids must be in [0, n)");
}

}  // namespace

VictimProbabilities VictimProbabilities::directed(int n, double rho,
                                                  const std::vector<int>& subset_a, double p_a) {
    check_subset(n, subset_a);
    const auto split =
        atwood::directed_split(n, rho, static_cast<int>(subset_a.size()), p_a);
    VictimProbabilities v;
    v.prob.assign(static_cast<std::size_t>(n), split.x_b);
    for (int e : subset_a) v.prob[static_cast<std::size_t>(e)] = split.x_a;
    return v;
}

VictimProbabilities VictimProbabilities::directed_single_side(int n, double rho,
                                                              const std::vector<int>& subset_a,
                                                              double p_a) {
    VictimProbabilities v = directed(n, rho, subset_a, p_a);
    const int a = static_cast<int>(subset_a.size());
    const int b = n - a;
    v.single_side_per_shock = true;
    v.in_subset.assign(static_cast<std::size_t>(n), 0);
    for (int e : subset_a) v.in_subset[static_cast<std::size_t>(e)] = 1;
    v.target_prob = p_a;
    v.cond_subset = static_cast<double>(n) * rho / static_cast<double>(a);
    v.cond_complement = static_cast<double>(n) * rho / static_cast<double>(b);
    // Feasibility only matters for sides a shock can actually pick.
    if (p_a > 0.0 && v.cond_subset > 1.0)
        throw DomainError("single-side shock is infeasible: the " + std::to_string(a) +
                          "-element subset needs per-element probability " +
                          std::to_string(v.cond_subset) + " > 1 (n=" + std::to_string(n) +
                          ", rho=" + std::to_string(rho) + ")");
    if (p_a < 1.0 && v.cond_complement > 1.0)
        throw DomainError("single-side shock is infeasible: the " + std::to_string(b) +
                          "-element complement needs per-element probability " +
                          std::to_string(v.cond_complement) + " > 1 (n=" + std::to_string(n) +
                          ", rho=" + std::to_string(rho) + ")");
    return v;
}

double apply_rounding(double hours, Rounding mode) {
    return mode == Rounding::Paper ? std::floor(hours + 0.5) : hours;
}

double next_nonlethal_delay(RandomStream& rng, double mu, Rounding mode) {
    if (!(mu > 0.0))
        throw DomainError("non-lethal shock rate must be > 0, got " + std::to_string(mu));
    return apply_rounding(rng.exponential(mu), mode);
}

double next_lethal_delay(RandomStream& rng, double omega, Rounding mode) {
    if (omega < 0.0)
        throw DomainError("lethal shock rate must be >= 0, got " + std::to_string(omega));
    if (omega == 0.0) return std::numeric_limits<double>::infinity();
    return apply_rounding(rng.exponential(omega), mode);
}

std::vector<int> mark_victims(RandomStream& rng, const VictimProbabilities& probs) {
    std::vector<int> victims;
    if (probs.single_side_per_shock) {
        const char side = rng.bernoulli(probs.target_prob) ? 1 : 0;
        const double p = side ? probs.cond_subset : probs.cond_complement;
        for (std::size_t e = 0; e < probs.prob.size(); ++e)
            if (probs.in_subset[e] == side && rng.bernoulli(p))
                victims.push_back(static_cast<int>(e));
        return victims;
    }
    for (std::size_t e = 0; e < probs.prob.size(); ++e)
        if (rng.bernoulli(probs.prob[e])) victims.push_back(static_cast<int>(e));
    return victims;
}

bool classify_detection(RandomStream& rng, double coverage) {
    if (!(coverage >= 0.0 && coverage <= 1.0))
        throw DomainError("coverage must be in [0, 1], got " + std::to_string(coverage));
    return rng.bernoulli(coverage);
}

}  // namespace ccfsim
