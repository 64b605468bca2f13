#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace levyhedge {

// Stream derivation: every consumer of randomness addresses a stream by
// (seed, domain, index). The splitmix64 finaliser decorrelates neighbouring
// indices; xoshiro256** is then seeded from four splitmix outputs.

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

enum class StreamDomain : std::uint64_t {
    paths = 0,
    surface = 1,
    hedge = 2,
    fresh = 3,
};

/// Seed for a logical domain derived from a user seed.
constexpr std::uint64_t domain_seed(std::uint64_t base_seed, StreamDomain domain) noexcept {
    return domain == StreamDomain::paths
               ? base_seed
               : splitmix64_mix(base_seed ^ splitmix64_mix(0xD1B54A32D192ED03ULL *
                                                           static_cast<std::uint64_t>(domain)));
}

struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_index = 0;
};

/// xoshiro256** (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(RngStream stream) noexcept {
        std::uint64_t sm = stream.seed ^ splitmix64_mix(stream.stream_index);
        for (auto& word : state_) {
            word = splitmix64_mix(sm);
            sm += 0x9E3779B97F4A7C15ULL;
        }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
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

    /// Uniform on the open interval (0, 1), built from the top 53 bits.
    double uniform() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

}  // namespace levyhedge
