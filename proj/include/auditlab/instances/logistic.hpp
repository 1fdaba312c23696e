#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "auditlab/instances/instance.hpp"
#include "auditlab/instances/labeled_data.hpp"
#include "auditlab/rng.hpp"

namespace auditlab {

struct LogisticConfig {
    double learning_rate = 0.1;
    std::size_t iterations = 2000;
    bool exclude_sensitive = false;
    // Rows drawn without replacement for training; 0 uses every row.
    std::size_t train_size = 0;
    // Single-class data yields an intercept-only model instead of DegenerateData.
    bool allow_single_class = false;
    double threshold = 0.5;
};

// Features are standardized by (center, scale); the group label is appended
// as a final input when include_sensitive is set.
struct LogisticModel {
    Vector weights;
    double bias = 0.0;
    Vector center;
    Vector scale;
    bool include_sensitive = true;
    double threshold = 0.5;

    double logit(std::span<const double> x, int a) const;
    double probability(std::span<const double> x, int a) const;
    int predict(std::span<const double> x, int a) const;
};

// Full-batch gradient descent on mean log-loss. The step is halved whenever
// it would raise the loss, so the recorded history is non-increasing.
LogisticModel train_logistic(const LabeledData& data, const LogisticConfig& config, RngStream& rng,
                             std::vector<double>* loss_history = nullptr);

double log_loss(const LogisticModel& model, const LabeledData& data);
double accuracy(const LogisticModel& model, const LabeledData& data);

class LogisticClassifier final : public Classifier {
public:
    explicit LogisticClassifier(LogisticModel model);

    Kind kind() const override { return model_.include_sensitive ? Kind::all_LR : Kind::wo_A_LR; }
    int predict(std::span<const double> x, int a) const override;
    void predict_batch(std::span<const double> rows, std::size_t dim, std::span<const int> groups,
                       std::span<int> out) const override;

    const LogisticModel& model() const { return model_; }

private:
    LogisticModel model_;
    Vector w_raw_;  // weights folded through the standardization
    double b_raw_;
    double w_group_;
    double cut_;    // logit(threshold)
};

}  // namespace auditlab
