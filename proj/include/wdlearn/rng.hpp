#pragma once

#include <cstdint>
#include <cmath>
#include <initializer_list>
#include <string_view>

namespace wdl {

// SplitMix64 (Steele, Lea, Flood 2014). Counter-based: the state advances by a
// fixed odd increment, so the k-th output is a pure function of (seed, k).
// All randomness in the library flows through this generator; independent
// streams are derived by hashing the base seed with domain tags.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the pair is drawn eagerly so the
    // consumption of the underlying counter stays deterministic.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        // avoid log(0)
        while (u1 <= 0.0) u1 = uniform01();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 6.283185307179586476925286766559 * u2;
        cached_ = radius * std::sin(angle);
        have_cached_ = true;
        return radius * std::cos(angle);
    }

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

// One avalanche round of SplitMix64, used as a mixing function.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_word(std::uint64_t h, std::uint64_t w) {
    return mix64(h ^ mix64(w));
}

inline std::uint64_t hash_tag(std::uint64_t h, std::string_view tag) {
    // FNV-1a over the tag bytes, folded into the running hash.
    std::uint64_t f = 0xCBF29CE484222325ULL;
    for (unsigned char c : tag) {
        f ^= c;
        f *= 0x100000001B3ULL;
    }
    return hash_word(h, f);
}

// Stream derivation: seed for (base, tag, indices...). Distinct tags give
// disjoint streams regardless of the index values (domain separation).
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                 std::initializer_list<std::uint64_t> indices = {}) {
    std::uint64_t h = hash_tag(mix64(base), tag);
    for (std::uint64_t i : indices) h = hash_word(h, i);
    return h;
}

} // namespace wdl
