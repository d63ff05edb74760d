#pragma once

#include <cstdint>
#include <random>

namespace texseg {

/// Seed for every stochastic routine. Same seed and parameters give bit-identical output.
struct Seed {
    std::uint64_t value = 0;

    friend bool operator==(const Seed&, const Seed&) = default;
};

/// SplitMix64 finalizer; decorrelates sub-stream seeds derived from one master seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent sub-stream `stream` of `seed`.
constexpr Seed derive_seed(Seed seed, std::uint64_t stream) noexcept {
    return Seed{mix_seed(seed.value ^ mix_seed(stream + 1))};
}

using Engine = std::mt19937_64;

inline Engine make_engine(Seed seed) { return Engine{seed.value}; }

}  // namespace texseg
