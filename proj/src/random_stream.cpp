#include "fractime/random_stream.hpp"

#include <cmath>

namespace fractime {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer (Stafford mix13).
std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id),
      key_(mix(seed + kGolden) ^ mix(stream_id * kGolden + 0x5851F42D4C957F2DULL)) {}

std::uint64_t RandomStream::next_u64() {
    return mix(key_ + (++counter_) * kGolden);
}

double RandomStream::uniform() {
    // 53-bit mantissa shifted into (0,1); the +0.5 offset excludes 0 and 1.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::exponential(double rate) {
    return -std::log(uniform()) / rate;
}

}  // namespace fractime
