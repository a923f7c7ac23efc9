#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace advda {

// FNV-1a; stable across platforms, unlike std::hash.
constexpr std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Every stochastic element of a run draws from its own stream derived from
/// (root seed, purpose tag). Splitmix64 finalizer over root ^ hash(tag).
constexpr std::uint64_t derive_seed(std::uint64_t root, std::string_view tag) {
    std::uint64_t z = root ^ fnv1a(tag);
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t root, std::string_view tag) {
    return std::mt19937_64(derive_seed(root, tag));
}

}  // namespace advda
