#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace auditlab {

// splitmix64 finalizer; used to derive child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

// Single-owner random stream. Never share one across threads; split instead.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }

    double uniform();
    double normal();
    double exponential(double rate);
    bool bernoulli(double p);
    std::size_t index(std::size_t n);
    std::uint64_t next_u64();

    // Child stream keyed by (seed, stream_id); does not advance this stream.
    RngStream split(std::uint64_t stream_id) const;

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace auditlab
