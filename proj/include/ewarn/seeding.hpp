#pragma once

#include <cstdint>
#include <string_view>

namespace ewarn::seeding {

/// SplitMix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// FNV-1a, used instead of std::hash so seeds do not depend on the standard library.
constexpr std::uint64_t hash(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

constexpr std::uint64_t combine(std::uint64_t seed, std::uint64_t value) {
    return mix(seed ^ mix(value));
}

/// Seed for one inference window: a pure function of the run seed and the
/// window identity, so results do not depend on task scheduling.
constexpr std::uint64_t window_seed(std::uint64_t run_seed, std::string_view location,
                                    std::string_view proxy_id, long date_serial) {
    std::uint64_t s = combine(run_seed, hash(location));
    s = combine(s, hash(proxy_id));
    return combine(s, static_cast<std::uint64_t>(date_serial));
}

}  // namespace ewarn::seeding
