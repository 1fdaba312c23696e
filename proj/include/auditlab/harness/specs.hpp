#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "auditlab/audit/exp_audit.hpp"
#include "auditlab/instances/empirical.hpp"
#include "auditlab/instances/lower_bound.hpp"
#include "auditlab/instances/mixture.hpp"
#include "auditlab/instances/summary.hpp"

namespace auditlab {

using Json = nlohmann::json;

// Instance documents, by "kind":
//   mixture            family, d, sigma2, group_probs, label_probs, means[a][y]
//                      (exponential: theta_box [lo, hi]); optional constants
//   generated_mixture  d, sigma2, group_probs, label_probs, eps, constants
//   lower_bound        eps, p, q, hypothesis, group1_prob (numbers or "a/b" strings)
//   synthetic_tabular  n_rows, group1_prob, label_probs, n_features, signal, group_shift
//   adult | law        path (raw CSV, encoded on load)
//   encoded_csv        path (x..., a, y)
// Relative paths resolve against base_dir. rng drives generated and synthetic kinds.
std::shared_ptr<const AuditInstance> instance_from_json(const Json& doc, const std::string& base_dir,
                                                        RngStream& rng);
// Throws ConfigError if the document cannot describe an instance.
void check_instance_json(const Json& doc);

Json instance_to_json(const AuditInstance& instance);

SmoothnessConstants constants_from_json(const Json& doc, SmoothnessConstants fallback);
Json constants_to_json(const SmoothnessConstants& c);

// Classifier documents, by "kind":
//   all_LR | wo_A_LR   trained on empirical rows: train_size, learning_rate, iterations, seed
//   logistic           weights, bias, center, scale, include_sensitive, threshold
//   random             seed
//   sense_attr
//   constant           value
//   halfspace          directions, offsets
//   calibrated_halfspace  acceptance per group (Gaussian mixtures)
//   instance           the classifier carried by a lower-bound instance
std::shared_ptr<const Classifier> classifier_from_json(const Json& doc, const AuditInstance& instance,
                                                       RngStream& rng);
void check_classifier_json(const Json& doc);
Json classifier_to_json(const Classifier& classifier);

Json report_to_json(const AuditReport& report);
Json params_to_json(const std::vector<CellParams>& params);
Json summary_to_json(const PopulationSummary& summary);

}  // namespace auditlab
