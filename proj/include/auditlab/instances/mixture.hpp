#pragma once

#include <array>
#include <memory>
#include <vector>

#include "auditlab/instances/classifiers.hpp"
#include "auditlab/instances/instance.hpp"
#include "auditlab/prob/exp_family.hpp"

namespace auditlab {

// A ~ group_probs, Y | A=a ~ Ber(label_probs[a]), X | Y=y, A=a ~ E_{theta[a][y]}.
class MixtureAuditInstance final : public AuditInstance {
public:
    MixtureAuditInstance(std::shared_ptr<const ExpFamily> family, Vector group_probs,
                         Vector label_probs, std::vector<std::array<Vector, 2>> params);

    std::string kind() const override { return "mixture"; }
    std::size_t n_groups() const override { return group_probs_.size(); }
    std::size_t point_dim() const override { return family_->point_dim(); }
    DrawOutcome sample_into(RngStream& rng, std::span<double> x) const override;

    const ExpFamily& family() const { return *family_; }
    std::shared_ptr<const ExpFamily> family_ptr() const { return family_; }
    const Vector& group_probs() const { return group_probs_; }
    const Vector& label_probs() const { return label_probs_; }
    const Vector& theta(int y, std::size_t a) const { return params_[a][static_cast<std::size_t>(y)]; }

private:
    std::shared_ptr<const ExpFamily> family_;
    Vector group_probs_;
    Vector label_probs_;
    std::vector<std::array<Vector, 2>> params_;  // [a][y]
};

int sample_group(const Vector& group_probs, RngStream& rng);

double separation_radius(const SmoothnessConstants& c, double eps, double q_max, double q_min);

struct MixtureGeneratorConfig {
    std::size_t d = 5;
    double sigma2 = 4.0;
    Vector group_probs{0.3, 0.7};
    Vector label_probs{0.4, 0.7};
    double eps = 0.1;
    SmoothnessConstants constants{1.0, 4.0, 4.0, 2.0, 0.5};
};

// Spherical Gaussian components. Per group, mu_1 has Uniform[-1, 1]
// coordinates and theta_0 = theta_1 + r u for a uniform unit u, where r is
// the separation radius.
MixtureAuditInstance generate_separated_mixture(const MixtureGeneratorConfig& config, RngStream& rng);

// Per group, a halfspace orthogonal to the mean difference whose acceptance
// probability is acceptance[a] for both labels. Gaussian families only.
GroupHalfspaceClassifier calibrate_orthogonal_halfspace(const MixtureAuditInstance& instance,
                                                        std::span<const double> acceptance,
                                                        RngStream& rng);

}  // namespace auditlab
