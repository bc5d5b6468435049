#pragma once

#include <cstdint>

namespace hammer {

/// splitmix64 stream: output i depends only on (seed, i), so workload values
/// are reproducible regardless of which worker emits which transaction.
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

/// Value written by setItem for the transaction with global sequence `seq`
/// under the plan's seed: the (seq+1)-th output of splitmix64(seed).
inline uint64_t workload_value(uint64_t seed, uint64_t seq) {
    SplitMix64 rng(seed + seq * 0x9e3779b97f4a7c15ULL);
    return rng.next();
}

}  // namespace hammer
