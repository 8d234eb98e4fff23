#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ccfsim/errors.hpp"

namespace ccfsim {

// SplitMix64 finalizer (Steele/Lea/Vigna). Decorrelates consecutive history indices.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Seed for one history. XOR with the mixed index keeps streams distinct per history
// while remaining a pure function of (master_seed, history_index).
inline std::uint64_t history_seed(std::uint64_t master_seed, std::uint64_t history_index) {
    return master_seed ^ splitmix64(history_index);
}

// Single random stream per history, consumed strictly in event order. mt19937_64 is
// bit-exact across platforms and all transforms below avoid std::*_distribution,
// whose draw sequences vary between standard library implementations.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Inverse-CDF sampling; log1p keeps precision for small uniforms.
    double exponential(double rate) {
        if (!(rate > 0.0)) throw DomainError("exponential rate must be > 0");
        return -std::log1p(-uniform()) / rate;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace ccfsim
