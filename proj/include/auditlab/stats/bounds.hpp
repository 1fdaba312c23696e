#pragma once

#include <cstdint>
#include <utility>

namespace auditlab {

struct TailBound {
    double lo;
    double hi;
    double failure_prob;  // raw value; may exceed 1
};

// Negative-binomial window for the tau-th success of Ber(p).
TailBound negbin_bounds(std::uint64_t tau, double p, double eps);

// 2 exp(-mu eps^2 / 3)
double chernoff_bound(double mu, double eps);

double kl_bernoulli(double p, double q);

// (1 - 2 eps, 1 + 4 eps)
std::pair<double, double> ratio_bounds(double eps);

}  // namespace auditlab
