#pragma once

#include <cstdint>
#include <random>

namespace seqcv {

using Rng = std::mt19937_64;

/// Independent purposes within one replicate draw from distinct streams.
enum class StreamTag : std::uint64_t {
    Errors = 1,
    Limit = 2,
    Stopping = 3,
    Calibration = 4,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Stream seed for (seed, replicate, tag):
///   h = splitmix64(seed)
///   h = splitmix64(h ^ (replicate * 0x9E3779B97F4A7C15 + 1))
///   h = splitmix64(h ^ (tag * 0xD1B54A32D192ED03))
/// The result seeds a 64-bit Mersenne Twister.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t replicate,
                                    StreamTag tag) noexcept {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ (replicate * 0x9E3779B97F4A7C15ULL + 1ULL));
    h = splitmix64(h ^ (static_cast<std::uint64_t>(tag) * 0xD1B54A32D192ED03ULL));
    return h;
}

Rng make_rng(std::uint64_t seed, std::uint64_t replicate, StreamTag tag);

}  // namespace seqcv
