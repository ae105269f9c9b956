#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

// Self-contained PRNG and samplers. The standard <random> distributions are
// implementation-defined, so frozen test values and on-disk artifacts would
// not survive a stdlib change; everything here is bit-stable by construction.

namespace hcpd {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic seed derivation: fold an arbitrary tag sequence into a seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = base;
    std::uint64_t h = splitmix64(s);
    s ^= a + 0x9e3779b97f4a7c15ULL;
    h ^= splitmix64(s);
    s ^= b + 0xc2b2ae3d27d4eb4fULL;
    h ^= splitmix64(s);
    s ^= c + 0x165667b19e3779f9ULL;
    h ^= splitmix64(s);
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t t = 1469598103934665603ULL;
    for (char ch : tag) {
        t ^= static_cast<unsigned char>(ch);
        t *= 1099511628211ULL;
    }
    return derive_seed(base, t, a, b);
}

// xoshiro256** (Blackman/Vigna), seeded via splitmix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0, bound), bound > 0
    std::uint64_t next_below(std::uint64_t bound) {
        // rejection from the top to avoid modulo bias
        const std::uint64_t threshold = -bound % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    bool bernoulli(double p) { return next_double() < p; }

    // Binomial(trials, p) by CDF inversion of a single uniform; trials stays
    // small here so the pmf walk is cheap.
    int binomial(int trials, double p) {
        if (p <= 0.0) return 0;
        if (p >= 1.0) return trials;
        const double u = next_double();
        const double ratio = p / (1.0 - p);
        double pmf = 1.0;
        for (int i = 0; i < trials; ++i) pmf *= 1.0 - p;
        double cdf = pmf;
        int k = 0;
        while (cdf < u && k < trials) {
            pmf *= ratio * static_cast<double>(trials - k) / static_cast<double>(k + 1);
            cdf += pmf;
            ++k;
        }
        return k;
    }

    // Beta(alpha, beta) via Johnk's rejection; fine for small shape values.
    double beta(double alpha, double beta) {
        for (;;) {
            double x = std::pow(next_double(), 1.0 / alpha);
            double y = std::pow(next_double(), 1.0 / beta);
            if (x + y <= 1.0 && x + y > 0.0) return x / (x + y);
        }
    }

    // Pareto with density ~ x^(-exponent) on [xmin, inf)
    double power_law(double xmin, double exponent) {
        double u = next_double();
        return xmin * std::pow(1.0 - u, -1.0 / (exponent - 1.0));
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
};

} // namespace hcpd
