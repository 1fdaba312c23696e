#pragma once

#include <cstdint>
#include <memory>
#include <span>

#include "auditlab/instances/instance.hpp"
#include "auditlab/prob/param_set.hpp"
#include "auditlab/rng.hpp"

namespace auditlab {

struct CostModel {
    double c_feat = 0.0;
    double c_lab = 0.0;

    bool operator==(const CostModel&) const = default;
};

// Costs are derived from the counters, so
// total = c_feat (n_label_requests + n_feature_requests) + c_lab n_defaults
// holds exactly. An individual whose features were bought and whose label is
// bought later moves from the feature count to the label count.
class CostLedger {
public:
    explicit CostLedger(CostModel costs);

    const CostModel& costs() const { return costs_; }
    double total_cost() const;
    double label_cost() const { return costs_.c_lab * static_cast<double>(n_defaults_); }

    std::uint64_t n_label_requests() const { return n_label_requests_; }
    std::uint64_t n_feature_requests() const { return n_feature_requests_; }
    std::uint64_t n_defaults() const { return n_defaults_; }
    std::uint64_t n_drawn() const { return n_drawn_; }

private:
    friend class PartialFeedbackEnv;

    CostModel costs_;
    std::uint64_t n_label_requests_ = 0;
    std::uint64_t n_feature_requests_ = 0;
    std::uint64_t n_defaults_ = 0;
    std::uint64_t n_drawn_ = 0;
};

// Handle to one online individual. (a, f) are always visible; x and y are
// visible when f = 1 or after the matching reveal call.
class Individual {
public:
    std::uint64_t id() const { return id_; }
    int group() const { return a_; }
    int decision() const { return f_; }
    bool feature_visible() const { return feature_visible_; }
    bool label_visible() const { return label_visible_; }

    // Throw AccessError while hidden.
    std::span<const double> features() const;
    int label() const;

private:
    friend class PartialFeedbackEnv;

    std::uint64_t env_id_ = 0;
    std::uint64_t id_ = 0;
    int a_ = 0;
    int f_ = 0;
    int y_ = 0;
    Vector x_;
    bool feature_visible_ = false;
    bool label_visible_ = false;
};

class PartialFeedbackEnv {
public:
    PartialFeedbackEnv(std::shared_ptr<const AuditInstance> instance,
                       std::shared_ptr<const Classifier> classifier, CostModel costs, RngStream rng);

    Individual draw_individual();
    // Label request: charges c_feat (unless already paid) + c_lab 1{y=0} when f = 0.
    int reveal_label(Individual& ind);
    // Feature-only request: charges c_feat once when f = 0.
    std::span<const double> reveal_feature(Individual& ind);

    const CostLedger& ledger() const { return ledger_; }
    const AuditInstance& instance() const { return *instance_; }
    const Classifier& classifier() const { return *classifier_; }
    std::size_t n_groups() const { return instance_->n_groups(); }

private:
    void check_owner(const Individual& ind) const;

    std::shared_ptr<const AuditInstance> instance_;
    std::shared_ptr<const Classifier> classifier_;
    CostLedger ledger_;
    RngStream rng_;
    std::uint64_t env_id_;
};

}  // namespace auditlab
