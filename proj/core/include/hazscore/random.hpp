#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hazscore {

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent generator for one (seed, key, purpose) triple, so results do
/// not depend on the order in which keys are processed.
inline std::mt19937_64 substream(std::uint64_t seed, std::string_view key, std::uint64_t purpose = 0) {
    const std::uint64_t k = splitmix64(seed ^ splitmix64(fnv1a64(key) ^ splitmix64(purpose)));
    std::seed_seq seq{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32),
                      static_cast<std::uint32_t>(purpose), static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32)};
    return std::mt19937_64(seq);
}

/// Uniform draw in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace hazscore
