#include "auditlab/env/environment.hpp"

#include <atomic>

#include "auditlab/errors.hpp"

namespace auditlab {

namespace {
std::atomic<std::uint64_t> g_next_env_id{1};
}

CostLedger::CostLedger(CostModel costs) : costs_(costs) {
    if (!(costs.c_feat >= 0.0) || !(costs.c_lab >= 0.0)) throw DomainError("costs must be non-negative");
}

double CostLedger::total_cost() const {
    return costs_.c_feat * static_cast<double>(n_label_requests_ + n_feature_requests_) +
           costs_.c_lab * static_cast<double>(n_defaults_);
}

std::span<const double> Individual::features() const {
    if (!feature_visible_) throw AccessError("features of an unrevealed negative are hidden");
    return x_;
}

int Individual::label() const {
    if (!label_visible_) throw AccessError("label of an unrevealed negative is hidden");
    return y_;
}

PartialFeedbackEnv::PartialFeedbackEnv(std::shared_ptr<const AuditInstance> instance,
                                       std::shared_ptr<const Classifier> classifier,
                                       CostModel costs, RngStream rng)
    : instance_(std::move(instance)),
      classifier_(std::move(classifier)),
      ledger_(costs),
      rng_(std::move(rng)),
      env_id_(g_next_env_id.fetch_add(1)) {
    if (!instance_ || !classifier_) throw DomainError("environment needs an instance and a classifier");
}

Individual PartialFeedbackEnv::draw_individual() {
    Individual ind;
    ind.x_.resize(instance_->point_dim());
    DrawOutcome d = instance_->sample_into(rng_, ind.x_);
    ind.env_id_ = env_id_;
    ind.id_ = ledger_.n_drawn_++;
    ind.a_ = d.a;
    ind.y_ = d.y;
    ind.f_ = classifier_->predict(ind.x_, d.a);
    ind.feature_visible_ = ind.f_ == 1;
    ind.label_visible_ = ind.f_ == 1;
    return ind;
}

void PartialFeedbackEnv::check_owner(const Individual& ind) const {
    if (ind.env_id_ != env_id_) throw AccessError("individual was drawn from another environment");
}

int PartialFeedbackEnv::reveal_label(Individual& ind) {
    check_owner(ind);
    if (ind.label_visible_) return ind.y_;
    if (ind.feature_visible_) {
        --ledger_.n_feature_requests_;
    }
    ++ledger_.n_label_requests_;
    if (ind.y_ == 0) ++ledger_.n_defaults_;
    ind.label_visible_ = true;
    ind.feature_visible_ = true;
    return ind.y_;
}

std::span<const double> PartialFeedbackEnv::reveal_feature(Individual& ind) {
    check_owner(ind);
    if (!ind.feature_visible_) {
        ++ledger_.n_feature_requests_;
        ind.feature_visible_ = true;
    }
    return ind.x_;
}

}  // namespace auditlab
