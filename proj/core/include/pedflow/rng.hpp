// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace pedflow {

using Rng = std::mt19937_64;

/// SplitMix64 step, used to decorrelate derived seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministically derives an independent seed for a named stream.
/// The same (master, stream, index) triple always yields the same seed, so
/// simulations stay reproducible no matter how work is scheduled.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index = 0) {
    std::uint64_t s = splitmix64(master ^ 0x6a09e667f3bcc909ULL);
    s = splitmix64(s ^ stream);
    return splitmix64(s ^ index);
}

namespace seed_stream {
inline constexpr std::uint64_t arrivals = 1;
inline constexpr std::uint64_t sensor_noise = 2;
inline constexpr std::uint64_t corpus = 3;
inline constexpr std::uint64_t repetition = 4;
}  // namespace seed_stream

}  // namespace pedflow
