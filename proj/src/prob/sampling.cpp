#include "auditlab/prob/sampling.hpp"

namespace auditlab {

std::uint64_t sample_until_tau_successes(std::span<const int> stream, std::uint64_t tau) {
    std::size_t i = 0;
    return sample_until_tau_successes(
        [&]() -> std::optional<bool> {
            if (i >= stream.size()) return std::nullopt;
            return stream[i++] != 0;
        },
        tau);
}

std::uint64_t bernoulli_until_tau_successes(double p, std::uint64_t tau, RngStream& rng) {
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("success probability must be in (0, 1]");
    return sample_until_tau_successes([&]() -> std::optional<bool> { return rng.bernoulli(p); },
                                      tau);
}

}  // namespace auditlab
