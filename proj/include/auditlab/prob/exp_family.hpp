#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "auditlab/prob/param_set.hpp"
#include "auditlab/rng.hpp"

namespace auditlab {

struct SmoothnessConstants {
    double kappa = 1.0;
    double lambda = 1.0;
    double lipschitz_L = 1.0;
    double ball_beta = 1.0;
    double positivity_alpha = 0.5;

    // Throws DomainError unless 0 < kappa <= lambda, kappa <= 1, L >= 1,
    // ball_beta >= 1 and alpha in (0, 1].
    void validate() const;
};

// Density h(x) exp(theta . T(x) - W(theta)) over a convex parameter set.
class ExpFamily {
public:
    virtual ~ExpFamily() = default;

    virtual std::string name() const = 0;
    virtual std::size_t dim() const = 0;
    virtual std::size_t point_dim() const = 0;
    virtual bool in_support(std::span<const double> x) const = 0;
    virtual double log_base_measure(std::span<const double> x) const = 0;
    virtual void suff_stat(std::span<const double> x, std::span<double> out) const = 0;
    virtual double log_partition(std::span<const double> theta) const = 0;
    virtual Vector grad_log_partition(std::span<const double> theta) const = 0;
    virtual void sample_into(std::span<const double> theta, RngStream& rng,
                             std::span<double> out) const = 0;

    // Closed-form inverse of grad W, or nullopt when none is known.
    virtual std::optional<Vector> natural_from_mean(std::span<const double> mean_stat) const;

    // Polynomial degree k of T, used by the theoretical schedule.
    virtual unsigned suff_stat_degree() const { return 1; }

    // True when T(x) = x, so batch kernels can run on raw points.
    virtual bool identity_suff_stat() const { return false; }

    Vector suff_stat(std::span<const double> x) const;
    void check_param(std::span<const double> theta) const;

    const SmoothnessConstants& constants() const { return constants_; }
    const ParamSet& param_set() const { return param_set_; }

protected:
    ExpFamily(SmoothnessConstants constants, ParamSet param_set);

private:
    SmoothnessConstants constants_;
    ParamSet param_set_;
};

double log_density(const ExpFamily& family, std::span<const double> theta,
                   std::span<const double> x);
Vector sample(const ExpFamily& family, std::span<const double> theta, RngStream& rng);

// N(mu, sigma2 I) with theta = mu / sigma2, T(x) = x,
// W(theta) = (sigma2/2)|theta|^2 + (d/2) log(2 pi sigma2).
class SphericalGaussian final : public ExpFamily {
public:
    SphericalGaussian(std::size_t d, double sigma2, SmoothnessConstants constants,
                      ParamSet param_set);
    // Unbounded parameter set, kappa = min(1, sigma2), lambda = sigma2.
    SphericalGaussian(std::size_t d, double sigma2);

    std::string name() const override { return "spherical_gaussian"; }
    std::size_t dim() const override { return d_; }
    std::size_t point_dim() const override { return d_; }
    bool in_support(std::span<const double> x) const override;
    double log_base_measure(std::span<const double> x) const override;
    void suff_stat(std::span<const double> x, std::span<double> out) const override;
    double log_partition(std::span<const double> theta) const override;
    Vector grad_log_partition(std::span<const double> theta) const override;
    void sample_into(std::span<const double> theta, RngStream& rng,
                     std::span<double> out) const override;
    std::optional<Vector> natural_from_mean(std::span<const double> mean_stat) const override;
    bool identity_suff_stat() const override { return true; }

    double sigma2() const { return sigma2_; }
    Vector theta_from_mean(std::span<const double> mu) const;
    Vector mean_from_theta(std::span<const double> theta) const;

    using ExpFamily::suff_stat;

private:
    std::size_t d_;
    double sigma2_;
};

// Exponential distribution with rate -theta on x >= 0: T(x) = x, h = 1, W = -log(-theta).
class ExponentialFamily1D final : public ExpFamily {
public:
    ExponentialFamily1D(SmoothnessConstants constants, ParamSet param_set);
    // Box [lo, hi] with hi < 0.
    ExponentialFamily1D(double lo, double hi);

    std::string name() const override { return "exponential"; }
    std::size_t dim() const override { return 1; }
    std::size_t point_dim() const override { return 1; }
    bool in_support(std::span<const double> x) const override;
    double log_base_measure(std::span<const double> x) const override;
    void suff_stat(std::span<const double> x, std::span<double> out) const override;
    double log_partition(std::span<const double> theta) const override;
    Vector grad_log_partition(std::span<const double> theta) const override;
    void sample_into(std::span<const double> theta, RngStream& rng,
                     std::span<double> out) const override;
    std::optional<Vector> natural_from_mean(std::span<const double> mean_stat) const override;
    bool identity_suff_stat() const override { return true; }

    using ExpFamily::suff_stat;
};

}  // namespace auditlab
