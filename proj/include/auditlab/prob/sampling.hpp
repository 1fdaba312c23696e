#pragma once

#include <concepts>
#include <cstdint>
#include <optional>
#include <span>

#include "auditlab/errors.hpp"
#include "auditlab/rng.hpp"

namespace auditlab {

// Pulls outcomes from `next` (returns std::optional<bool>, nullopt = end of
// stream) until the tau-th success; returns its 1-based index N.
template <class Next>
    requires std::invocable<Next&>
std::uint64_t sample_until_tau_successes(Next&& next, std::uint64_t tau) {
    if (tau == 0) throw DomainError("tau must be at least 1");
    std::uint64_t n = 0;
    std::uint64_t hits = 0;
    while (hits < tau) {
        std::optional<bool> outcome = next();
        if (!outcome) throw StreamExhausted("stream ended before tau successes");
        ++n;
        if (*outcome) ++hits;
    }
    return n;
}

std::uint64_t sample_until_tau_successes(std::span<const int> stream, std::uint64_t tau);

// Unbounded Ber(p) stream.
std::uint64_t bernoulli_until_tau_successes(double p, std::uint64_t tau, RngStream& rng);

}  // namespace auditlab
