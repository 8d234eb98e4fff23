#include "ccfsim/atwood.hpp"

#include <array>
#include <cmath>
#include <string>

namespace ccfsim::atwood {

namespace {

void check_n(int n) {
    if (n < 1 || n > kMaxElements)
        throw DomainError("element count must be in [1, " + std::to_string(kMaxElements) +
                          "], got " + std::to_string(n));
}

void check_prob(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0))
        throw DomainError(std::string(name) + " must be in [0, 1], got " + std::to_string(p));
}

void check_rate(double r, const char* name) {
    if (!(r >= 0.0))
        throw DomainError(std::string(name) + " must be >= 0, got " + std::to_string(r));
}

void check_params(int n, const Params& p) {
    check_n(n);
    check_rate(p.lambda_ind, "lambda_ind");
    check_rate(p.mu, "mu");
    check_rate(p.omega, "omega");
    check_prob(p.rho, "rho");
}

void check_fractions(double alpha, double beta) {
    check_prob(alpha, "alpha");
    check_prob(beta, "beta");
    if (alpha + beta > 1.0)
        throw DomainError("alpha + beta must be <= 1, got " + std::to_string(alpha + beta));
}

}  // namespace

double shock_term(double rho, int k, int n) {
    check_prob(rho, "rho");
    if (n < 0 || k < 0 || k > n) throw DomainError("shock_term requires 0 <= k <= n");
    if (rho == 0.0) return k == 0 ? 1.0 : 0.0;
    if (rho == 1.0) return k == n ? 1.0 : 0.0;
    if (k <= 20) return std::pow(rho, k) * std::pow(1.0 - rho, n - k);
    return std::exp(k * std::log(rho) + (n - k) * std::log1p(-rho));
}

std::uint64_t binomial_coefficient(int n, int k) {
    if (n < 0 || n > kMaxElements) throw DomainError("binomial_coefficient requires 0 <= n <= 64");
    if (k < 0 || k > n) throw DomainError("binomial_coefficient requires 0 <= k <= n");
    // Pascal row additions never overflow here: every partial value is itself a
    // binomial coefficient and C(64, 32) < 2^64.
    std::array<std::uint64_t, kMaxElements + 1> row{};
    row[0] = 1;
    for (int i = 1; i <= n; ++i)
        for (int j = i; j >= 1; --j) row[j] += row[j - 1];
    return row[k];
}

double q_group(int k, int n, const Params& p) {
    check_params(n, p);
    if (k < 1 || k > n)
        throw DomainError("group size must be in [1, n], got " + std::to_string(k));
    if (n == 1) return p.lambda_ind + p.mu * p.rho + p.omega;
    if (k == 1) return p.lambda_ind + p.mu * shock_term(p.rho, 1, n);
    if (k == n) return p.mu * shock_term(p.rho, n, n) + p.omega;
    return p.mu * shock_term(p.rho, k, n);
}

double q_total_element(int n, const Params& p) {
    check_params(n, p);
    double sum = 0.0;
    for (int k = 1; k <= n; ++k)
        sum += static_cast<double>(binomial_coefficient(n - 1, k - 1)) * shock_term(p.rho, k, n);
    return p.lambda_ind + p.omega + p.mu * sum;
}

double beta_factor_element(int n, const Params& p, const BetaOptions& opt) {
    check_params(n, p);
    const double total = q_total_element(n, p);
    if (total == 0.0) throw DomainError("beta factor undefined: total element failure rate is 0");
    const int k_first = opt.include_single_victim_shocks ? 1 : 2;
    double sum = 0.0;
    for (int k = k_first; k <= n; ++k)
        sum += static_cast<double>(binomial_coefficient(n - 1, k - 1)) * shock_term(p.rho, k, n);
    return (p.omega + p.mu * sum) / total;
}

DirectedSplit directed_split(int n, double rho, int a, double p_a) {
    check_n(n);
    check_prob(rho, "rho");
    check_prob(p_a, "p_a");
    if (n < 2) throw DomainError("directed split needs at least 2 elements");
    if (a < 1 || a > n - 1)
        throw DomainError("subset size must be in [1, n-1], got " + std::to_string(a));
    DirectedSplit s;
    s.x_a = static_cast<double>(n) * rho * p_a / static_cast<double>(a);
    s.x_b = static_cast<double>(n) * rho * (1.0 - p_a) / static_cast<double>(n - a);
    if (s.x_a > 1.0)
        throw DomainError("directed split is infeasible: subset A probability " +
                          std::to_string(s.x_a) + " exceeds 1 (n=" + std::to_string(n) +
                          ", rho=" + std::to_string(rho) + ", a=" + std::to_string(a) +
                          ", p_a=" + std::to_string(p_a) + ")");
    if (s.x_b > 1.0)
        throw DomainError("directed split is infeasible: subset B probability " +
                          std::to_string(s.x_b) + " exceeds 1 (n=" + std::to_string(n) +
                          ", rho=" + std::to_string(rho) + ", a=" + std::to_string(a) +
                          ", p_a=" + std::to_string(p_a) + ")");
    return s;
}

double shock_sum(int n, double rho, SumVariant variant) {
    check_n(n);
    check_prob(rho, "rho");
    double sum = 0.0;
    for (int k = 1; k <= n; ++k) {
        double term = shock_term(rho, k, n);
        if (variant == SumVariant::Binomial)
            term *= static_cast<double>(binomial_coefficient(n - 1, k - 1));
        sum += term;
    }
    return sum;
}

SolvedRates solve_rates(int n, double alpha, double beta, double rho, double lambda_ind,
                        SumVariant variant) {
    check_rate(lambda_ind, "lambda_ind");
    check_fractions(alpha, beta);
    const double s = shock_sum(n, rho, variant);
    const double a11 = 1.0 - alpha * s, a12 = -alpha;
    const double a21 = -beta * s, a22 = 1.0 - beta;
    const double det = a11 * a22 - a12 * a21;  // equals 1 - beta - alpha*s
    if (!(det > 0.0))
        throw DomainError("rate system is singular: alpha*S + beta >= 1 (alpha=" +
                          std::to_string(alpha) + ", beta=" + std::to_string(beta) +
                          ", S=" + std::to_string(s) + ")");
    const double r1 = alpha * lambda_ind, r2 = beta * lambda_ind;
    return {(r1 * a22 - a12 * r2) / det, (a11 * r2 - a21 * r1) / det};
}

double gamma_ratio(int n, double alpha, double beta, double rho, SumVariant variant) {
    check_fractions(alpha, beta);
    return 1.0 - alpha * shock_sum(n, rho, variant) - beta;
}

GammaBoth gamma_ratio_both(int n, double alpha, double beta, double rho) {
    return {gamma_ratio(n, alpha, beta, rho, SumVariant::CoefficientFree),
            gamma_ratio(n, alpha, beta, rho, SumVariant::Binomial)};
}

EstimatedRates estimate_rates_from_counts(double mean_count, int n, double mission_hours,
                                          double alpha, double beta, double gamma) {
    check_n(n);
    if (!(mean_count >= 0.0)) throw DomainError("mean failure count must be >= 0");
    if (!(mission_hours > 0.0)) throw DomainError("mission_hours must be > 0");
    check_fractions(alpha, beta);
    if (!(gamma > 0.0))
        throw DomainError("gamma must be > 0 to invert rates, got " + std::to_string(gamma));
    EstimatedRates r;
    r.lambda_ind = mean_count / (mission_hours * static_cast<double>(n));
    r.lambda_total = r.lambda_ind / gamma;
    r.mu = alpha * r.lambda_ind / gamma;
    r.omega = beta * r.lambda_ind / gamma;
    return r;
}

DetectionSplit split_detection(double lambda_ind, double coverage) {
    check_rate(lambda_ind, "lambda_ind");
    check_prob(coverage, "coverage");
    DetectionSplit d;
    // Compute the larger share first; subtracting it from the total is then
    // exact, so the two rates sum back to lambda_ind bit for bit.
    if (coverage >= 0.5) {
        d.lambda_sa = coverage * lambda_ind;
        d.lambda_nsa = lambda_ind - d.lambda_sa;
    } else {
        d.lambda_nsa = (1.0 - coverage) * lambda_ind;
        d.lambda_sa = lambda_ind - d.lambda_nsa;
    }
    return d;
}

}  // namespace ccfsim::atwood
