#include "auditlab/prob/exp_family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "auditlab/errors.hpp"
#include "auditlab/simd/kernels.hpp"

namespace auditlab {

void SmoothnessConstants::validate() const {
    if (!(kappa > 0.0) || !(kappa <= lambda)) throw DomainError("need 0 < kappa <= lambda");
    if (kappa > 1.0) throw DomainError("need kappa <= 1");
    if (!(lipschitz_L >= 1.0)) throw DomainError("need lipschitz_L >= 1");
    if (!(ball_beta >= 1.0)) throw DomainError("need ball_beta >= 1");
    if (!(positivity_alpha > 0.0 && positivity_alpha <= 1.0))
        throw DomainError("need positivity_alpha in (0, 1]");
}

ExpFamily::ExpFamily(SmoothnessConstants constants, ParamSet param_set)
    : constants_(constants), param_set_(std::move(param_set)) {
    constants_.validate();
}

std::optional<Vector> ExpFamily::natural_from_mean(std::span<const double>) const {
    return std::nullopt;
}

Vector ExpFamily::suff_stat(std::span<const double> x) const {
    Vector out(dim());
    suff_stat(x, out);
    return out;
}

void ExpFamily::check_param(std::span<const double> theta) const {
    if (theta.size() != dim()) throw ParamOutOfSet("parameter dimension mismatch");
    if (!param_set_.contains(theta)) throw ParamOutOfSet("theta outside the parameter set");
}

double log_density(const ExpFamily& family, std::span<const double> theta,
                   std::span<const double> x) {
    family.check_param(theta);
    if (!family.in_support(x)) return -std::numeric_limits<double>::infinity();
    Vector t = family.suff_stat(x);
    return family.log_base_measure(x) + simd::dot(theta, t) - family.log_partition(theta);
}

Vector sample(const ExpFamily& family, std::span<const double> theta, RngStream& rng) {
    family.check_param(theta);
    Vector out(family.point_dim());
    family.sample_into(theta, rng, out);
    return out;
}

// ---------------------------------------------------------------- Gaussian

namespace {

SmoothnessConstants gaussian_defaults(double sigma2) {
    SmoothnessConstants c;
    c.kappa = std::min(1.0, sigma2);
    c.lambda = sigma2;
    c.lipschitz_L = 1.0;
    c.ball_beta = 1.0;
    c.positivity_alpha = 0.5;
    return c;
}

}  // namespace

SphericalGaussian::SphericalGaussian(std::size_t d, double sigma2, SmoothnessConstants constants,
                                     ParamSet param_set)
    : ExpFamily(constants, std::move(param_set)), d_(d), sigma2_(sigma2) {
    if (d == 0) throw DomainError("dimension must be positive");
    if (!(sigma2 > 0.0)) throw DomainError("sigma2 must be positive");
    if (this->param_set().dim() != d) throw DomainError("parameter set dimension mismatch");
}

SphericalGaussian::SphericalGaussian(std::size_t d, double sigma2)
    : SphericalGaussian(d, sigma2, gaussian_defaults(sigma2), ParamSet::whole_space(d)) {}

bool SphericalGaussian::in_support(std::span<const double> x) const { return x.size() == d_; }

double SphericalGaussian::log_base_measure(std::span<const double> x) const {
    return -simd::dot(x, x) / (2.0 * sigma2_);
}

void SphericalGaussian::suff_stat(std::span<const double> x, std::span<double> out) const {
    std::copy(x.begin(), x.end(), out.begin());
}

double SphericalGaussian::log_partition(std::span<const double> theta) const {
    return 0.5 * sigma2_ * simd::dot(theta, theta) +
           0.5 * static_cast<double>(d_) * std::log(2.0 * std::numbers::pi * sigma2_);
}

Vector SphericalGaussian::grad_log_partition(std::span<const double> theta) const {
    return mean_from_theta(theta);
}

void SphericalGaussian::sample_into(std::span<const double> theta, RngStream& rng,
                                    std::span<double> out) const {
    const double sd = std::sqrt(sigma2_);
    for (std::size_t i = 0; i < d_; ++i) out[i] = sigma2_ * theta[i] + sd * rng.normal();
}

std::optional<Vector> SphericalGaussian::natural_from_mean(std::span<const double> mean_stat) const {
    return theta_from_mean(mean_stat);
}

Vector SphericalGaussian::theta_from_mean(std::span<const double> mu) const {
    Vector t(mu.begin(), mu.end());
    for (double& v : t) v /= sigma2_;
    return t;
}

Vector SphericalGaussian::mean_from_theta(std::span<const double> theta) const {
    Vector m(theta.begin(), theta.end());
    for (double& v : m) v *= sigma2_;
    return m;
}

// ------------------------------------------------------------- Exponential

namespace {

SmoothnessConstants exponential_defaults(double lo, double hi) {
    // Hessian of W is 1/theta^2, so on [lo, hi] it lies in [1/lo^2, 1/hi^2].
    SmoothnessConstants c;
    c.lambda = 1.0 / (hi * hi);
    c.kappa = std::min({1.0, 1.0 / (lo * lo), c.lambda});
    c.lipschitz_L = std::max(1.0, -1.0 / hi);
    c.ball_beta = 1.0;
    c.positivity_alpha = 0.5;
    return c;
}

bool strictly_negative(const ParamSet& s) {
    if (s.dim() != 1) return false;
    if (s.kind() == ParamSet::Kind::ball) return s.center()[0] + s.radius() < 0.0;
    return s.hi()[0] < 0.0;
}

}  // namespace

ExponentialFamily1D::ExponentialFamily1D(SmoothnessConstants constants, ParamSet param_set)
    : ExpFamily(constants, std::move(param_set)) {
    if (!strictly_negative(this->param_set()))
        throw DomainError("exponential family needs a 1-D parameter set inside theta < 0");
}

ExponentialFamily1D::ExponentialFamily1D(double lo, double hi)
    : ExponentialFamily1D(exponential_defaults(lo, hi), ParamSet::box({lo}, {hi})) {}

bool ExponentialFamily1D::in_support(std::span<const double> x) const {
    return x.size() == 1 && x[0] >= 0.0;
}

double ExponentialFamily1D::log_base_measure(std::span<const double> x) const {
    return in_support(x) ? 0.0 : -std::numeric_limits<double>::infinity();
}

void ExponentialFamily1D::suff_stat(std::span<const double> x, std::span<double> out) const {
    out[0] = x[0];
}

double ExponentialFamily1D::log_partition(std::span<const double> theta) const {
    if (!(theta[0] < 0.0)) throw DomainError("exponential family needs theta < 0");
    return -std::log(-theta[0]);
}

Vector ExponentialFamily1D::grad_log_partition(std::span<const double> theta) const {
    if (!(theta[0] < 0.0)) throw DomainError("exponential family needs theta < 0");
    return {-1.0 / theta[0]};
}

void ExponentialFamily1D::sample_into(std::span<const double> theta, RngStream& rng,
                                      std::span<double> out) const {
    out[0] = rng.exponential(-theta[0]);
}

std::optional<Vector> ExponentialFamily1D::natural_from_mean(
    std::span<const double> mean_stat) const {
    if (!(mean_stat[0] > 0.0)) throw DegenerateMoments("mean of T must be positive");
    return Vector{-1.0 / mean_stat[0]};
}

}  // namespace auditlab
