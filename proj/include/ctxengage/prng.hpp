#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace ctxengage {

// FNV-1a over (seed, tag). Used to derive independent generator streams, so
// adding a new tagged stream never perturbs the draws of existing ones.
inline std::uint64_t stream_seed(std::uint64_t seed, std::string_view tag) {
    std::uint64_t h = 14695981039346656037ULL;
    auto mix = [&h](unsigned char byte) {
        h ^= byte;
        h *= 1099511628211ULL;
    };
    for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(seed >> (8 * i)));
    for (char c : tag) mix(static_cast<unsigned char>(c));
    return h;
}

// All randomized components draw from mt19937_64: the one engine the C++
// standard pins down bit-for-bit, so artifacts reproduce across platforms.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::string_view tag) {
    return std::mt19937_64(stream_seed(seed, tag));
}

// Stable 64-bit hash of a string (entity ids). Independent of stream_seed.
inline std::uint64_t hash64(std::string_view s, std::uint64_t salt = 0) {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ salt;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0xff51afd7ed558ccdULL;
        h ^= h >> 33;
    }
    return h;
}

inline double uniform01(std::mt19937_64& rng) {
    // 53-bit mantissa draw, identical on every platform.
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Fisher-Yates; std::shuffle is not portable across standard libraries.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace ctxengage
