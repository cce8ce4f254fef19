#pragma once

#include <cstdint>

namespace sgdtheta {

/// Counter-based 64-bit generator.
///
/// Output k is obtained by applying the SplitMix64 finalizer to the affine
/// counter state
///
///     state_k = seed + (k + 1) * 0x9E3779B97F4A7C15   (mod 2^64)
///     mix(z):  z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
///              z ^= z >> 27; z *= 0x94D049BB133111EB;
///              z ^= z >> 31; return z;
///
/// The stream is a pure function of (seed, k): cloning the value forks the
/// stream, and the same seed reproduces the same sequence on every platform.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    static std::uint64_t mix(std::uint64_t z);

    /// Output for an absolute counter position (does not advance the stream).
    static std::uint64_t at(std::uint64_t seed, std::uint64_t k);

    std::uint64_t next_u64();

    /// Uniform double in [0, 1): top 53 bits scaled by 2^-53.
    double next_unit();

    /// Uniform double in [-1, 1).
    double next_symmetric();

    /// Standard normal via Box-Muller; consumes two outputs per pair and
    /// caches the second.
    double next_gaussian();

    /// Uniform integer in [0, n) via the 128-bit multiply-shift reduction.
    std::uint64_t next_below(std::uint64_t n);

    std::uint64_t position() const { return counter_; }
    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace sgdtheta
