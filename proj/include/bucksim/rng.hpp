#pragma once

#include <cstdint>
#include <random>

namespace bucksim {

using Engine = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seed of stream `stream` derived from a base seed. Replica k of an ensemble
// always draws from stream k, independent of how replicas are scheduled.
constexpr std::uint64_t stream_seed(std::uint64_t base, std::uint64_t stream) {
    return mix64(mix64(base) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

inline Engine make_stream(std::uint64_t base, std::uint64_t stream) {
    return Engine(stream_seed(base, stream));
}

} // namespace bucksim
