// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace promptopt {

// Fully specified generators so runs are reproducible independent of the
// standard library's distribution implementations.

inline constexpr uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Seed-tree derivation: substreams are keyed by a path of integer parts
// (stage, iteration, prompt index, candidate index, ...). Order-sensitive.
inline uint64_t derive_seed(uint64_t root, std::initializer_list<uint64_t> parts) {
    uint64_t s = splitmix64(root ^ 0x5a17ac3bull);
    uint64_t depth = 1;
    for (uint64_t p : parts) {
        s = splitmix64(s ^ splitmix64(p + 0x9e37u * depth));
        ++depth;
    }
    return s;
}

inline uint64_t derive_seed(uint64_t root, std::string_view label,
                            std::initializer_list<uint64_t> parts = {}) {
    return derive_seed(splitmix64(root ^ fnv1a64(label)), parts);
}

class Rng {
public:
    explicit Rng(uint64_t seed) : state_(splitmix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // Uniform double in [0, 1) with 53 bits of precision.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). n must be positive.
    int next_int(int n) { return static_cast<int>(next_u64() % static_cast<uint64_t>(n)); }

    // Uniform integer in [lo, hi] inclusive.
    int next_range(int lo, int hi) { return lo + next_int(hi - lo + 1); }

private:
    uint64_t state_;
};

}  // namespace promptopt
