#include "auditlab/instances/mixture.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>

#include "auditlab/errors.hpp"
#include "auditlab/simd/kernels.hpp"

namespace auditlab {

namespace {

void check_probability_vector(const Vector& probs) {
    if (probs.size() < 2) throw DomainError("at least two groups required");
    double s = 0.0;
    for (double p : probs) {
        if (!(p > 0.0 && p < 1.0)) throw DomainError("group probabilities must be in (0, 1)");
        s += p;
    }
    if (std::abs(s - 1.0) > 1e-9) throw DomainError("group probabilities must sum to 1");
}

Vector random_unit(std::size_t d, RngStream& rng) {
    Vector u(d);
    double n2 = 0.0;
    while (n2 < 1e-24) {
        for (double& v : u) v = rng.normal();
        n2 = simd::dot(u, u);
    }
    const double s = 1.0 / std::sqrt(n2);
    for (double& v : u) v *= s;
    return u;
}

}  // namespace

MixtureAuditInstance::MixtureAuditInstance(std::shared_ptr<const ExpFamily> family,
                                           Vector group_probs, Vector label_probs,
                                           std::vector<std::array<Vector, 2>> params)
    : family_(std::move(family)),
      group_probs_(std::move(group_probs)),
      label_probs_(std::move(label_probs)),
      params_(std::move(params)) {
    if (!family_) throw DomainError("mixture needs a family");
    check_probability_vector(group_probs_);
    if (label_probs_.size() != group_probs_.size() || params_.size() != group_probs_.size())
        throw DomainError("label_probs and params need one entry per group");
    for (double q : label_probs_)
        if (!(q > 0.0 && q < 1.0)) throw DomainError("label probabilities must be in (0, 1)");
    for (const auto& pair : params_)
        for (const Vector& theta : pair) family_->check_param(theta);
}

int sample_group(const Vector& group_probs, RngStream& rng) {
    double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t a = 0; a + 1 < group_probs.size(); ++a) {
        acc += group_probs[a];
        if (u < acc) return static_cast<int>(a);
    }
    return static_cast<int>(group_probs.size() - 1);
}

DrawOutcome MixtureAuditInstance::sample_into(RngStream& rng, std::span<double> x) const {
    const int a = sample_group(group_probs_, rng);
    const int y = rng.bernoulli(label_probs_[static_cast<std::size_t>(a)]) ? 1 : 0;
    family_->sample_into(theta(y, static_cast<std::size_t>(a)), rng, x);
    return {a, y};
}

double separation_radius(const SmoothnessConstants& c, double eps, double q_max, double q_min) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must be in (0, 1)");
    if (!(q_min > 0.0 && q_min <= q_max && q_max <= 1.0))
        throw DomainError("need 0 < q_min <= q_max <= 1");
    const double lb = std::max(c.lipschitz_L, c.ball_beta);
    const double coef =
        (48.0 * lb * c.ball_beta + 3.0 * c.lambda) / (4.0 * c.kappa * c.ball_beta * c.ball_beta);
    return std::sqrt(coef * std::log(10.0 * q_max / (q_min * eps)));
}

MixtureAuditInstance generate_separated_mixture(const MixtureGeneratorConfig& config,
                                                RngStream& rng) {
    if (config.d == 0) throw DomainError("dimension must be positive");
    check_probability_vector(config.group_probs);
    if (config.label_probs.size() != config.group_probs.size())
        throw DomainError("label_probs needs one entry per group");
    config.constants.validate();

    auto family = std::make_shared<SphericalGaussian>(config.d, config.sigma2, config.constants,
                                                      ParamSet::whole_space(config.d));
    std::vector<std::array<Vector, 2>> params;
    for (std::size_t a = 0; a < config.group_probs.size(); ++a) {
        const double q1 = config.label_probs[a];
        const double r = separation_radius(config.constants, config.eps, std::max(q1, 1.0 - q1),
                                           std::min(q1, 1.0 - q1));
        Vector mu1(config.d);
        for (double& v : mu1) v = 2.0 * rng.uniform() - 1.0;
        Vector u = random_unit(config.d, rng);
        const Vector theta1 = family->theta_from_mean(mu1);
        Vector theta0(config.d);
        for (std::size_t j = 0; j < config.d; ++j) theta0[j] = theta1[j] + r * u[j];
        params.push_back({theta0, theta1});
    }
    return MixtureAuditInstance(family, config.group_probs, config.label_probs, std::move(params));
}

GroupHalfspaceClassifier calibrate_orthogonal_halfspace(const MixtureAuditInstance& instance,
                                                        std::span<const double> acceptance,
                                                        RngStream& rng) {
    const auto* gauss = dynamic_cast<const SphericalGaussian*>(&instance.family());
    if (gauss == nullptr) throw DomainError("calibrated halfspace needs a spherical Gaussian family");
    const std::size_t d = gauss->dim();
    if (d < 2) throw DomainError("calibrated halfspace needs d >= 2");
    if (acceptance.size() != instance.n_groups())
        throw DomainError("one acceptance rate per group required");

    const boost::math::normal standard;
    const double sd = std::sqrt(gauss->sigma2());
    std::vector<Vector> dirs;
    Vector offsets;
    for (std::size_t a = 0; a < instance.n_groups(); ++a) {
        const double pi = acceptance[a];
        if (!(pi > 0.0 && pi < 1.0)) throw DomainError("acceptance rates must be in (0, 1)");
        Vector mu1 = gauss->mean_from_theta(instance.theta(1, a));
        Vector mu0 = gauss->mean_from_theta(instance.theta(0, a));
        Vector u(d);
        for (std::size_t j = 0; j < d; ++j) u[j] = mu0[j] - mu1[j];
        const double un = std::sqrt(simd::dot(u, u));
        Vector v = random_unit(d, rng);
        if (un > 0.0) {
            for (double& e : u) e /= un;
            double dotvu = simd::dot(v, u);
            for (std::size_t j = 0; j < d; ++j) v[j] -= dotvu * u[j];
            double vn = std::sqrt(simd::dot(v, v));
            for (double& e : v) e /= vn;
        }
        offsets.push_back(simd::dot(v, mu1) - sd * boost::math::quantile(standard, pi));
        dirs.push_back(std::move(v));
    }
    return GroupHalfspaceClassifier(std::move(dirs), std::move(offsets));
}

}  // namespace auditlab
