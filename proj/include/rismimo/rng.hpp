#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "rismimo/mathutil.hpp"

namespace rismimo {

// Deterministic random stream with cheap derivation of independent
// substreams. Substreams are keyed by 64-bit tags so that parallel
// Monte Carlo shards (one per frame, per antenna, ...) draw from
// reproducible, non-overlapping sequences regardless of scheduling.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : seed_material_(seed), engine_(mix(seed)) {}

    RandomStream child(std::uint64_t tag) const {
        return RandomStream(mix(seed_material_ ^ (0x9e3779b97f4a7c15ULL * (tag + 1))));
    }

    double uniform01() {
        // in [0, 1)
        return (engine_() >> 11) * 0x1.0p-53;
    }

    // Circularly-symmetric complex Gaussian with E|n|^2 = sigma2.
    cdouble complex_normal(double sigma2) {
        const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
        const double u2 = uniform01();
        const double r = std::sqrt(-sigma2 * std::log(u1));
        return cdouble(r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2));
    }

    double normal(double mean, double stddev) {
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }

    std::uint64_t next_u64() { return engine_(); }

private:
    static std::uint64_t mix(std::uint64_t x) {
        // splitmix64 finalizer
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t seed_material_;
    std::mt19937_64 engine_;
};

}  // namespace rismimo
