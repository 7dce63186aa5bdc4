#pragma once

#include <cstdint>

namespace tiltkde::rng {

// splitmix64 finalizer. Statistically strong enough that chaining it over
// (seed, stream, index, slot) behaves like an independent uniform per key.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based word: pure in its key, no state, any draw addressable
// directly. Worker schedule therefore cannot change a sample.
inline std::uint64_t word_at(std::uint64_t seed, std::uint64_t stream,
                             std::uint64_t index, std::uint64_t slot) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ (stream + 0x632be59bd9b4e019ULL));
    h = mix64(h ^ index);
    h = mix64(h ^ (slot + 0x9e6c63d0876a9a47ULL));
    return h;
}

// Uniform on (0, 1]: 53-bit mantissa, never 0, so log() is always finite.
inline double uniform_oc(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t index, std::uint64_t slot) {
    return static_cast<double>((word_at(seed, stream, index, slot) >> 11) + 1) * 0x1.0p-53;
}

// Uniform on [0, 1).
inline double uniform_co(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t index, std::uint64_t slot) {
    return static_cast<double>(word_at(seed, stream, index, slot) >> 11) * 0x1.0p-53;
}

} // namespace tiltkde::rng
