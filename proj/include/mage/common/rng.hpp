#pragma once

#include <cstdint>
#include <random>

namespace mage {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Deterministic RNG stream. Wraps mt19937_64 but derives bounded ints and
/// unit doubles itself so sequences do not depend on the standard library's
/// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t next_below(std::uint64_t n) {
        // rejection sampling keeps the draw unbiased
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return v % n;
    }

    int next_index(int n) { return static_cast<int>(next_below(static_cast<std::uint64_t>(n))); }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool next_bernoulli(double p) { return next_unit() < p; }

private:
    std::mt19937_64 engine_;
};

/// Derives an independent stream from a base seed and up to three indices
/// (run seed, epoch, slot). Used by the parallel rollout fan-out.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a = 0, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    std::uint64_t h = splitmix64(base);
    h = splitmix64(h ^ (0x9e3779b97f4a7c15ull + a));
    h = splitmix64(h ^ (0xc2b2ae3d27d4eb4full + b));
    h = splitmix64(h ^ (0x165667b19e3779f9ull + c));
    return h;
}

}  // namespace mage
