#ifndef RINGSWARM_RNG_HPP
#define RINGSWARM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "ringswarm/angles.hpp"

namespace ringswarm {

/// splitmix64 step; used to derive independent sub-seeds from a base seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Deterministic seed derivation: mixes a base seed with stream tags so that
/// cells, seeds, and sub-streams never collide. Identical inputs give
/// identical outputs on every platform.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag_a, std::uint64_t tag_b = 0) {
    std::uint64_t s = base;
    (void)splitmix64(s);
    s ^= tag_a;
    (void)splitmix64(s);
    s ^= tag_b;
    return splitmix64(s);
}

/// Seeded RNG with fully specified output. mt19937_64 is bit-exact across
/// platforms; the uniform and gaussian transforms below avoid the
/// implementation-defined std:: distributions so that runs reproduce
/// bit-for-bit anywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    double angle() { return uniform(0.0, two_pi); }

    /// Box-Muller transform; consumes exactly two uniforms per draw.
    double gaussian(double mu, double sigma) {
        double u1 = 1.0 - uniform(); // (0, 1]
        double u2 = uniform();
        return mu + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace ringswarm

#endif
