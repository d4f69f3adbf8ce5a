#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

// Reproducible random source. Simulation results are part of the contract, so
// the generator and the stream-splitting rule are fixed:
//
//   * substream keys are folded into the user seed with the SplitMix64
//     finalizer: k' = mix64(k + PHI * (tag * 2^32 + index + 1))
//   * the folded key seeds a SplitMix64 sequence whose first four outputs
//     initialize a xoshiro256** state
//   * integer draws in [0, n) use next() % n
//
// Everything is plain uint64 arithmetic, identical on every platform.

namespace medlink::rng {

inline constexpr std::uint64_t kPhi = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// substream domains; keeps replication/link/device indices from colliding
enum class StreamTag : std::uint64_t { replication = 1, path = 2, link = 3, device = 4 };

inline constexpr std::uint64_t derive(std::uint64_t seed, StreamTag tag, std::uint64_t index) {
    return mix64(seed + kPhi * ((static_cast<std::uint64_t>(tag) << 32) + index + 1));
}

class SplitMix64 {
  public:
    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}
    constexpr std::uint64_t next() {
        state_ += kPhi;
        return mix64(state_);
    }

  private:
    std::uint64_t state_;
};

class Xoshiro256ss {
  public:
    explicit constexpr Xoshiro256ss(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = kPhi;
    }

    constexpr std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform draw in [0, n); n must be >= 1
    constexpr std::uint64_t uniform(std::uint64_t n) { return next() % n; }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::array<std::uint64_t, 4> s_{};
};

}  // namespace medlink::rng
