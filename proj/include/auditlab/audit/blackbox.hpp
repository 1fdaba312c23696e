#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "auditlab/env/environment.hpp"
#include "auditlab/env/past_database.hpp"

namespace auditlab {

enum class Verdict { fair, unfair };
enum class Conditioning { joint, per_group };

const char* verdict_name(Verdict v);

// Indexed [y][a]. Joint estimates p_{y,a}, q_{y,a}; per-group estimates p_{y|a}, q_{y|a}.
struct CellEstimates {
    Conditioning conditioning = Conditioning::per_group;
    std::array<Vector, 2> p_hat;
    std::array<Vector, 2> q_hat;
};

struct AuditReport {
    std::string algorithm;
    Verdict verdict = Verdict::fair;
    double delta_hat = 0.0;
    CellEstimates estimates;
    std::uint64_t samples_drawn = 0;
    std::uint64_t labels_requested = 0;
    double cost = 0.0;
    double label_cost = 0.0;  // c_lab-attributed part of cost
    double tau_used = 0.0;
    bool capped = false;
    bool truncated_run = false;
    std::uint64_t seed = 0;
};

struct AuditOptions {
    std::optional<double> tau_cap;
    std::optional<std::uint64_t> R_cap;
    // Draw budget for each online stopping-time loop.
    std::uint64_t draw_cap = 10'000'000;
    // Fixed tau in place of the formula (tau-sweep protocol).
    std::optional<double> tau_override;
    std::uint64_t seed = 0;
};

// 576 ln(8 n_groups / delta) / eps^2
double compute_tau(double eps, double delta, std::size_t n_groups);

Verdict decide(double delta_hat, double eps);

// max_y max_{a,a'} |p/q(y,a) - p/q(y,a')|
double estimate_eod(const CellEstimates& est);

struct OnlineCount {
    std::uint64_t n = 0;
    std::uint64_t hits = 0;
    bool truncated = false;
};

// Rejection-sampling loop: A != a draws are skipped for free, A = a draws are
// labeled (paying when f = 0) and counted until the tau-th with Y = y.
OnlineCount online_sample_capped(PartialFeedbackEnv& env, std::uint64_t tau, int y, int a,
                                 std::uint64_t draw_cap);
std::uint64_t online_sample(PartialFeedbackEnv& env, std::uint64_t tau, int y, int a);

// Zero-cost scan of the database in stored order; throws InsufficientHistory.
std::uint64_t past_sample(const PastDatabase& db, std::uint64_t tau, int y, int a,
                          Conditioning conditioning);

AuditReport baseline_audit(PartialFeedbackEnv& env, const PastDatabase& db, double eps,
                           double delta, const AuditOptions& options = {});
AuditReport rs_audit(PartialFeedbackEnv& env, const PastDatabase& db, double eps, double delta,
                     const AuditOptions& options = {});

}  // namespace auditlab
