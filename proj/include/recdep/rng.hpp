#pragma once

#include <cstdint>
#include <random>

namespace recdep {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Independent engine for stream `stream` of a run seeded with `seed`. The
/// same (seed, stream) pair always yields the same sequence.
inline Rng stream_rng(std::uint64_t seed, std::uint64_t stream) {
    const std::uint64_t a = mix64(seed + 0x9e3779b97f4a7c15ULL);
    const std::uint64_t b = mix64(a ^ mix64(stream + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32)};
    return Rng(seq);
}

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) { return std::generate_canonical<double, 64>(rng); }

}  // namespace recdep
