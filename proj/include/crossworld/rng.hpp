#pragma once

#include <cstdint>

#include "crossworld/math.hpp"

namespace crossworld {

// SplitMix64 (Steele, Lea & Flood 2014; the reference public-domain constants).
//
// Chosen over the <random> engines because parallel simulation needs cheap,
// statistically independent substreams addressable by index: every simulated
// unit gets its own stream derived from (seed, unit index), so results do not
// depend on how work is split across threads. All variate generation goes
// through the inverse CDF, consuming exactly one uniform per draw.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform on the open interval (0, 1): top 53 bits, centered on the grid
    // so that 0 and 1 are unreachable (keeps the inverse CDFs finite).
    double uniform01() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal(double mu, double sd) {
        return mu + sd * inverse_normal_cdf(uniform01());
    }

    double logistic() {
        return inverse_logistic_cdf(uniform01());
    }

    int bernoulli(double p) {
        return uniform01() < p ? 1 : 0;
    }

private:
    std::uint64_t state_;
};

// Seed of the index-th substream of base_seed. The +1 keeps substream 0
// distinct from the base stream itself; the extra next() decorrelates
// neighboring indices.
inline std::uint64_t derive_stream_seed(std::uint64_t base_seed, std::uint64_t index) {
    SplitMix64 mix(base_seed + (index + 1) * 0x9E3779B97F4A7C15ull);
    return mix.next();
}

inline SplitMix64 substream(std::uint64_t base_seed, std::uint64_t index) {
    return SplitMix64(derive_stream_seed(base_seed, index));
}

} // namespace crossworld
