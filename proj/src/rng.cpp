#include "auditlab/rng.hpp"

#include <cmath>

namespace auditlab {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

double RngStream::uniform() { return unit_(engine_); }

double RngStream::normal() { return normal_(engine_); }

double RngStream::exponential(double rate) {
    return -std::log1p(-uniform()) / rate;
}

bool RngStream::bernoulli(double p) { return uniform() < p; }

std::size_t RngStream::index(std::size_t n) {
    std::uniform_int_distribution<std::size_t> dist(0, n - 1);
    return dist(engine_);
}

std::uint64_t RngStream::next_u64() { return engine_(); }

RngStream RngStream::split(std::uint64_t stream_id) const {
    return RngStream(mix_seed(seed_, stream_id));
}

}  // namespace auditlab
