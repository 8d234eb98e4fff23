#pragma once

#include <cstdint>

#include "ccfsim/errors.hpp"

// Closed-form side of the shock model: group failure rates, the per-element beta
// factor, directed victim probabilities, and the inversion from situation-rate
// fractions to shock rates. All rates are per hour.
namespace ccfsim::atwood {

inline constexpr int kMaxElements = 64;  // binomial coefficients stay exact in uint64

struct Params {
    double lambda_ind = 2.35e-6;  // independent failure rate of one element
    double mu = 0.0;              // non-lethal shock rate
    double omega = 0.0;           // lethal shock rate
    double rho = 0.0;             // per-element failure probability given a non-lethal shock
};

enum class SumVariant {
    // S(rho, n) = sum_{k=1..n} rho^k (1-rho)^(n-k), no combinatorial coefficients
    CoefficientFree,
    // S(rho, n) = sum_{k=1..n} C(n-1, k-1) rho^k (1-rho)^(n-k), telescopes to rho
    Binomial,
};

// rho^k (1-rho)^(n-k). Exact at rho in {0, 1}; evaluated in the log domain for
// k > 20 so deep tails neither underflow nor lose relative precision.
double shock_term(double rho, int k, int n);

// C(n, k) exactly; requires n <= 64.
std::uint64_t binomial_coefficient(int n, int k);

// Failure rate of one specific group of k out of n elements. Independent failures
// contribute only to k = 1, lethal shocks only to k = n; for n = 1 all three causes
// hit the single element and the rate is their union.
double q_group(int k, int n, const Params& p);

// Total failure rate of one element: lambda_ind + omega + mu * sum_k C(n-1, k-1)
// rho^k (1-rho)^(n-k). The sum telescopes to rho; it is evaluated explicitly here
// and the identity is checked in tests.
double q_total_element(int n, const Params& p);

struct BetaOptions {
    // Count single-victim shocks (k = 1) as common cause in the numerator.
    // false restricts the numerator to k >= 2; the denominator is unaffected.
    bool include_single_victim_shocks = true;
};

// Common-cause fraction of one element's total failure rate.
double beta_factor_element(int n, const Params& p, const BetaOptions& opt = {});

struct DirectedSplit {
    double x_a = 0.0;  // per-element victim probability inside subset A
    double x_b = 0.0;  // outside subset A
};

// Split the uniform victim probability rho into subset-directed probabilities
// preserving the expected victim count: a*x_a + (n-a)*x_b = n*rho, where p_a is the
// fraction of expected victims steered into A. Throws when either probability
// exceeds 1, naming the overflowing subset.
DirectedSplit directed_split(int n, double rho, int a, double p_a);

// S(rho, n) for the chosen variant, evaluated as an explicit sum.
double shock_sum(int n, double rho, SumVariant variant);

struct SolvedRates {
    double mu = 0.0;
    double omega = 0.0;
};

// Solve the 2x2 linear system tying the shock rates to the independent rate via the
// situation fractions alpha (non-lethal) and beta (lethal):
//   (1 - alpha*S) * mu -      alpha * omega = alpha * lambda_ind
//      (-beta*S)  * mu + (1 - beta) * omega =  beta * lambda_ind
// The determinant equals gamma_ratio below; it collapses to mu = alpha*lambda/gamma,
// omega = beta*lambda/gamma, which tests use as an independent cross-check.
SolvedRates solve_rates(int n, double alpha, double beta, double rho, double lambda_ind,
                        SumVariant variant);

// lambda_ind / lambda_total = 1 - alpha * S(rho, n) - beta.
double gamma_ratio(int n, double alpha, double beta, double rho, SumVariant variant);

struct GammaBoth {
    double coefficient_free = 0.0;
    double binomial = 0.0;
};
GammaBoth gamma_ratio_both(int n, double alpha, double beta, double rho);

struct EstimatedRates {
    double lambda_ind = 0.0;
    double lambda_total = 0.0;  // lambda_ind / gamma
    double mu = 0.0;
    double omega = 0.0;
};

// Invert a measured mean independent-failure count back into model rates:
// lambda_ind = mean_count / (mission_hours * n), then scale by the fractions.
EstimatedRates estimate_rates_from_counts(double mean_count, int n, double mission_hours,
                                          double alpha, double beta, double gamma);

struct DetectionSplit {
    double lambda_sa = 0.0;   // self-announcing: detected the moment it happens
    double lambda_nsa = 0.0;  // found only by periodic test
};

// lambda_sa = coverage * lambda_ind; lambda_nsa is formed by subtraction so the
// two parts always sum to lambda_ind exactly in floating point.
DetectionSplit split_detection(double lambda_ind, double coverage);

}  // namespace ccfsim::atwood
