#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "sipauth/garble.hpp"

namespace sipauth {

inline uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stable sub-seed derivation so independent campaign cells own private,
/// order-independent randomness.
inline uint64_t derive_seed(uint64_t base, uint64_t a = 0, uint64_t b = 0, uint64_t c = 0) {
    uint64_t s = base;
    uint64_t h = splitmix64(s);
    s = h ^ a;
    h = splitmix64(s);
    s = h ^ b;
    h = splitmix64(s);
    s = h ^ c;
    h = splitmix64(s);
    return h;
}

/// Unbiased draw in [0, bound) by rejection; avoids the
/// implementation-defined std::uniform_int_distribution so outputs are
/// identical across standard libraries.
inline uint64_t uniform_below(std::mt19937_64& rng, uint64_t bound) {
    const uint64_t max = std::numeric_limits<uint64_t>::max();
    const uint64_t limit = max - max % bound;
    uint64_t v = rng();
    while (v >= limit) {
        v = rng();
    }
    return v % bound;
}

inline uint8_t random_bit(std::mt19937_64& rng) {
    return static_cast<uint8_t>(rng() >> 63);
}

inline std::vector<uint8_t> random_bytes(std::mt19937_64& rng, size_t n) {
    std::vector<uint8_t> out;
    out.reserve(n);
    uint64_t word = 0;
    for (size_t i = 0; i < n; ++i) {
        if (i % 8 == 0) {
            word = rng();
        }
        out.push_back(static_cast<uint8_t>(word >> (8 * (i % 8))));
    }
    return out;
}

inline BitVec random_bits(std::mt19937_64& rng, size_t n) {
    BitVec out;
    for (size_t i = 0; i < n; ++i) {
        out.push_back(random_bit(rng));
    }
    return out;
}

inline Nonce random_nonce(std::mt19937_64& rng) {
    Nonce n;
    const auto bytes = random_bytes(rng, n.value.size());
    std::copy(bytes.begin(), bytes.end(), n.value.begin());
    return n;
}

inline DeviceSecret random_secret(std::mt19937_64& rng) {
    DeviceSecret s;
    const auto bytes = random_bytes(rng, s.seed.size());
    std::copy(bytes.begin(), bytes.end(), s.seed.begin());
    return s;
}

}  // namespace sipauth
