#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "auditlab/prob/exp_family.hpp"
#include "auditlab/rng.hpp"

namespace auditlab {

// Classifier restricted to one group: x -> f(x, a).
using FeaturePredicate = std::function<int(std::span<const double>)>;

struct TruncEstConfig {
    double eps_target = 0.1;
    double delta = 0.1;
    std::size_t n_init = 1000;
    std::size_t m_per_candidate = 2000;
    // Unset: max(10, 10 ceil(ln(1/delta))).
    std::optional<std::size_t> n_candidates;
    // Unset: 0.01 kappa.
    std::optional<double> eta;
    // Unset: ceil(10 / alpha).
    std::optional<std::size_t> max_accept_attempts;
    bool use_theoretical_schedule = false;
    double schedule_C = 1.0;

    // Return the mean of the second half of each chain instead of its last iterate.
    bool tail_average = true;
    // Shrink m_per_candidate to fit the available samples (never below min_steps).
    bool fit_to_data = true;
    std::size_t min_steps = 10;
    // When false and no candidate has a strict majority, fall back to the
    // candidate with the smallest distance to its nearest half of the others.
    bool strict_majority = false;

    // Throws DomainError on zero counts, non-positive eta or out-of-range eps/delta.
    void validate() const;
};

// Concrete values after defaults, the schedule and fit_to_data are applied.
struct ResolvedTruncEst {
    double eps_internal = 0.0;
    std::size_t n_init = 0;
    std::size_t m = 0;
    std::size_t n_candidates = 0;
    double eta = 0.0;
    std::size_t max_accept_attempts = 0;
    double projection_radius = 0.0;
    double majority_radius = 0.0;
};

ResolvedTruncEst resolve_trunc_est(const TruncEstConfig& config, const ExpFamily& family,
                                   std::size_t n_samples);

struct TheoreticalSchedule {
    double d_alpha = 0.0;
    double kappa_f = 0.0;
    double lambda_f = 0.0;
    double rho_sq = 0.0;
    double G = 0.0;
    double C = 1.0;
    double n = 0.0;
    double m = 0.0;
    double eta = 0.0;
};

// k is the polynomial degree of the sufficient statistic. Values may overflow to inf.
TheoreticalSchedule theoretical_schedule(const SmoothnessConstants& c, std::size_t dim, double eps,
                                         double delta, double C = 1.0, unsigned k = 1);

// Draws Z' ~ E_theta until f(Z') = 1 and writes T(Z') - T(z) into out.
// Throws AcceptanceFailure after max_attempts rejections.
void sample_gradient_into(std::span<const double> z, std::span<const double> theta,
                          const FeaturePredicate& f, const ExpFamily& family, RngStream& rng,
                          std::size_t max_attempts, std::span<double> out,
                          std::size_t* attempts = nullptr);
Vector sample_gradient(std::span<const double> z, std::span<const double> theta,
                       const FeaturePredicate& f, const ExpFamily& family, RngStream& rng,
                       std::size_t max_attempts);

// `points` is row-major with family.point_dim() columns.
Vector mle_from_moments(const ExpFamily& family, std::span<const double> points);

// Alternating projection onto ball(theta0, radius) and the parameter set.
Vector project_to_feasible(std::span<const double> theta, std::span<const double> theta0,
                           double radius, const ParamSet& param_set);

// Index of a candidate with more than half of all candidates (itself included)
// within radius; nullopt when there is none.
std::optional<std::size_t> majority_candidate(const std::vector<Vector>& candidates, double radius);
// Candidate minimizing the distance to its (floor(n/2)+1)-th nearest candidate.
std::size_t densest_candidate(const std::vector<Vector>& candidates);

// One projected-SGD chain over `points`. If trace is given, records 20 evenly
// spaced iterates.
Vector run_sgd_chain(std::span<const double> theta0, std::span<const double> points,
                     const FeaturePredicate& f, const ExpFamily& family,
                     const ResolvedTruncEst& schedule, bool tail_average, RngStream& rng,
                     std::vector<Vector>* trace = nullptr);

struct TruncEstResult {
    Vector theta;
    Vector theta_init;
    std::vector<Vector> candidates;
    ResolvedTruncEst schedule;
    bool majority_found = false;
    bool retried = false;
    // Chains abandoned after an AcceptanceFailure; candidates holds the survivors.
    std::size_t failed_chains = 0;
};

// Throws InsufficientSamples, and NoMajorityCandidate in strict mode after one
// retry on a reshuffled copy of the data. A chain that exhausts its
// rejection budget is dropped; AcceptanceFailure propagates only when at
// least half of the chains are dropped.
TruncEstResult trunc_est_detailed(std::span<const double> points, const FeaturePredicate& f,
                                  const ExpFamily& family, const TruncEstConfig& config,
                                  RngStream& rng);
Vector trunc_est(std::span<const double> points, const FeaturePredicate& f,
                 const ExpFamily& family, const TruncEstConfig& config, RngStream& rng);

}  // namespace auditlab
