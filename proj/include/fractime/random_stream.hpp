#pragma once

#include <cstdint>

namespace fractime {

// Counter-based pseudo-random stream. A draw is a pure function of
// (seed, stream_id, counter), so identical addressing reproduces identical
// values regardless of scheduling, and distinct stream_ids give
// statistically independent streams.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64();

    // Uniform on the open interval (0, 1).
    double uniform();

    // Exponential with the given rate.
    double exponential(double rate = 1.0);

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace fractime
