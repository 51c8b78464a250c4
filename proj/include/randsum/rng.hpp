#pragma once

#include <array>
#include <cstdint>

namespace randsum {

double inverse_normal_cdf(double p); // special.hpp, forward-declared to keep this header light

/// xoshiro256++ with per-stream states derived from (seed, stream) via SplitMix64.
///
/// Streams are how batches get independent, reproducible randomness: batch b of a
/// run seeded with s uses Rng(s, b). Identical (seed, stream) always yields the
/// identical sequence, on every platform (no libstdc++ distributions involved).
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
        for (auto& word : state_) word = splitmix64(x);
        // all-zero state is the one forbidden xoshiro state
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[3] = 1;
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform in the open interval (0, 1); never returns an endpoint,
    /// so inverse-CDF transforms are always finite.
    double uniform01() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal by quantile inversion (deterministic across platforms).
    double normal() { return inverse_normal_cdf(uniform01()); }

    /// Fair sign.
    double sign() { return (next() >> 63) ? 1.0 : -1.0; }

    static constexpr const char* kGeneratorId = "xoshiro256++/splitmix64-streams";

private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::array<std::uint64_t, 4> state_;
};

} // namespace randsum
