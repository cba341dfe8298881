#pragma once

#include <cstdint>

namespace ricker {

// splitmix64 finalizer (the mixing permutation alone, no increment).
std::uint64_t mix64(std::uint64_t z);

// Sebastiano Vigna's splitmix64; used only for seeding.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();

private:
    std::uint64_t state_;
};

// xoshiro256++ with a polar-method normal cache. One instance per trajectory;
// instances are cheap (40 bytes) and must never be shared across threads.
class Xoshiro256pp {
public:
    // State filled with four splitmix64 outputs of `seed`.
    explicit Xoshiro256pp(std::uint64_t seed);

    // Decorrelated per-index substream: the splitmix64 sequence is re-keyed
    // with seed ^ mix64(index + 0x9e3779b97f4a7c15). Plain windowed seeding
    // would hand adjacent indices three of four identical state words.
    static Xoshiro256pp substream(std::uint64_t seed, std::uint64_t index);

    std::uint64_t next();

    // ((x >> 11) + 0.5) * 2^-53, strictly inside (0, 1).
    double uniform01();

    // Standard normal via Marsaglia's polar method; the spare deviate is
    // cached in the generator.
    double normal();

private:
    std::uint64_t s_[4];
    double spare_ = 0;
    bool has_spare_ = false;
};

}  // namespace ricker
