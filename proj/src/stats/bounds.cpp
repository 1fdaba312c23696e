#include "auditlab/stats/bounds.hpp"

#include <cmath>

#include "auditlab/errors.hpp"

namespace auditlab {

TailBound negbin_bounds(std::uint64_t tau, double p, double eps) {
    if (tau < 1) throw DomainError("tau must be at least 1");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("p must be in (0, 1)");
    if (!(eps >= 0.0 && eps <= 1.0)) throw DomainError("eps must be in [0, 1]");
    const double t = static_cast<double>(tau);
    return {(1.0 - eps) * t / p, (1.0 + eps) * t / p, 2.0 * std::exp(-t * eps * eps / 4.0)};
}

double chernoff_bound(double mu, double eps) {
    if (!(mu > 0.0)) throw DomainError("mu must be positive");
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must be in (0, 1)");
    return 2.0 * std::exp(-mu * eps * eps / 3.0);
}

double kl_bernoulli(double p, double q) {
    if (!(p > 0.0 && p < 1.0) || !(q > 0.0 && q < 1.0))
        throw DomainError("kl_bernoulli needs p, q in (0, 1)");
    return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

std::pair<double, double> ratio_bounds(double eps) {
    if (!(eps > 0.0 && eps < 0.5)) throw DomainError("eps must be in (0, 1/2)");
    return {1.0 - 2.0 * eps, 1.0 + 4.0 * eps};
}

}  // namespace auditlab
