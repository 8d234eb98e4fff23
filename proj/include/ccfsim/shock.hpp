#pragma once

#include <cstdint>
#include <vector>

#include "ccfsim/rng.hpp"

// Shock arrival and victim sampling, shared by the engine and by distribution tests.
namespace ccfsim {

enum class Rounding : std::uint8_t {
    Continuous,  // exponential delays used as drawn
    Paper,       // floor(x + 0.5): delays snap to whole hours
};

enum class DetectionGranularity : std::uint8_t {
    PerShock,   // one coverage draw decides detection for every victim of the shock
    PerVictim,  // each victim draws detection independently
};

// Per-element victim probabilities for non-lethal shocks: either uniform rho or a
// directed split between one subset and its complement.
struct VictimProbabilities {
    std::vector<double> prob;  // marginal probability per element id

    // Single-side sampling: each shock first commits to the subset (probability
    // target_prob) or its complement, then hits each element of the chosen side
    // with that side's conditional probability. Per-element marginals are the
    // same as in `prob`; only the joint distribution differs (victims of one
    // shock never straddle both sides).
    bool single_side_per_shock = false;
    std::vector<char> in_subset;   // indexed by element id
    double target_prob = 0.0;      // probability a shock targets the subset
    double cond_subset = 0.0;      // per-element hit probability on the subset side
    double cond_complement = 0.0;  // same for the complement side

    static VictimProbabilities uniform(int n, double rho);
    // subset_a: sorted unique element ids receiving x_a; the rest receive x_b.
    // Every shock draws every element against its marginal.
    static VictimProbabilities directed(int n, double rho, const std::vector<int>& subset_a,
                                        double p_a);
    // Same marginals, but one side per shock. The conditional probability
    // n*rho/side_size must fit in [0, 1] for every side that can be chosen.
    static VictimProbabilities directed_single_side(int n, double rho,
                                                    const std::vector<int>& subset_a, double p_a);
};

// How directed shocks pick their victims.
enum class ShockTargeting : std::uint8_t {
    SingleSide,  // each shock hits only the subset or only its complement
    PerElement,  // each shock draws every element against its marginal
};

double apply_rounding(double hours, Rounding mode);

// Delay to the next non-lethal shock. A zero or negative rate is a domain error;
// callers skip the stream entirely when shocks are disabled.
double next_nonlethal_delay(RandomStream& rng, double mu, Rounding mode);

// Delay to the next lethal shock; omega == 0 means never and yields +infinity.
double next_lethal_delay(RandomStream& rng, double omega, Rounding mode);

// Victim sampling for one shock, victims returned ascending. Marginal mode draws
// one Bernoulli per element in ascending id order; single-side mode draws the
// side first, then one Bernoulli per element of that side in ascending id order.
std::vector<int> mark_victims(RandomStream& rng, const VictimProbabilities& probs);

// Coverage draw: true = the failure announces itself, false = it stays hidden
// until a periodic test.
bool classify_detection(RandomStream& rng, double coverage);

}  // namespace ccfsim
