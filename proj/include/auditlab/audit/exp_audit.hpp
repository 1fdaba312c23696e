#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "auditlab/audit/blackbox.hpp"
#include "auditlab/audit/trunc_est.hpp"

namespace auditlab {

// argmax_y log q_y + log E_{theta_y}(x); ties go to y = 1.
struct MapOracle {
    int group = 0;
    std::array<double, 2> weights{0.5, 0.5};  // [y]
    std::array<Vector, 2> params;             // [y]
    std::shared_ptr<const ExpFamily> family;

    // Throws DomainError on non-positive weights or invalid parameters.
    void validate() const;
};

// log-odds of y = 1 over y = 0; the base measure cancels.
double map_score(const MapOracle& oracle, std::span<const double> x);
int map_classify(const MapOracle& oracle, std::span<const double> x);
// Row-major batch; uses the SIMD affine kernel when T(x) = x.
void map_classify_batch(const MapOracle& oracle, std::span<const double> rows,
                        std::span<int> out);

// Scores within this band of zero count as ties.
inline constexpr double kMapTieBand = 1e-10;

// ceil(3430 ln(log_constant * n_groups / delta) / (q_tilde_min eps^2))
std::uint64_t compute_R(double q_tilde_min, double eps, double delta, std::size_t n_groups,
                        double log_constant = 12.0);

struct ExpAuditOptions {
    // tau_cap caps both tau and tau'. R_cap defaults to 20000.
    AuditOptions audit{std::nullopt, std::uint64_t{20000}, 10'000'000, std::nullopt, 0};
    double eps_prime = 0.1;
    double R_log_constant = 12.0;
    // eps_target and delta are overwritten per cell.
    TruncEstConfig trunc;
};

struct CellParams {
    int group = 0;
    int y = 0;
    Vector theta_hat;
    double q_tilde = 0.0;
    double q_hat = 0.0;
    double p_hat = 0.0;
};

struct ExpAuditResult {
    AuditReport report;
    std::vector<CellParams> params;  // ordered by (group, y)
    std::vector<std::uint64_t> R;    // per group, after capping
    double tau_prime = 0.0;
    bool trunc_retried = false;
    bool majority_fallback = false;
    std::size_t failed_chains = 0;
};

// Throws InsufficientHistory when a cell of the database is too small.
ExpAuditResult exp_audit_detailed(PartialFeedbackEnv& env, const PastDatabase& db, double eps,
                                  double delta, std::shared_ptr<const ExpFamily> family,
                                  const ExpAuditOptions& options, RngStream& rng);
AuditReport exp_audit(PartialFeedbackEnv& env, const PastDatabase& db, double eps, double delta,
                      std::shared_ptr<const ExpFamily> family, const ExpAuditOptions& options,
                      RngStream& rng);

}  // namespace auditlab
