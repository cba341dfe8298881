#include "ricker/rng.hpp"

#include <cmath>

namespace ricker {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}
}  // namespace

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
}

Xoshiro256pp Xoshiro256pp::substream(std::uint64_t seed, std::uint64_t index) {
    return Xoshiro256pp(seed ^ mix64(index + 0x9E3779B97F4A7C15ull));
}

std::uint64_t Xoshiro256pp::next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Xoshiro256pp::uniform01() {
    // 53 uniform bits, offset half a ulp: never exactly 0 or 1, so log() and
    // pow(u, 1/k) downstream are always finite.
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1p-53;
}

double Xoshiro256pp::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, w, q;
    do {
        u = 2.0 * uniform01() - 1.0;
        w = 2.0 * uniform01() - 1.0;
        q = u * u + w * w;
    } while (q >= 1.0 || q == 0.0);
    const double f = std::sqrt(-2.0 * std::log(q) / q);
    spare_ = w * f;
    has_spare_ = true;
    return u * f;
}

}  // namespace ricker
