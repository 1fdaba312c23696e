#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "auditlab/harness/config.hpp"
#include "auditlab/instances/lower_bound.hpp"
#include "auditlab/instances/summary.hpp"

namespace auditlab {

struct SweepOutput {
    std::vector<ResultRow> rows;
    std::vector<RunRecord> records;  // in cell order
    std::vector<std::string> notes;
};

// Runs fn(i) for i in [0, n) on up to `threads` workers (0: hardware
// concurrency). The exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

// Rows needed so that every per-group and joint cell of a past database
// reaches tau positives with a 25% margin.
std::size_t auto_past_db_size(const PopulationSummary& summary, double tau);

// Exact summary where available, otherwise a 10^6-draw Monte Carlo estimate.
PopulationSummary best_summary(const AuditInstance& instance, const Classifier& classifier,
                               std::uint64_t seed);

SweepOutput run_blackbox_sweep(const ExperimentConfig& config);
SweepOutput run_mixture_sweep(const ExperimentConfig& config);

struct LowerBoundCaseResult {
    LowerBoundCase input;
    std::string fair_eod;
    std::string unfair_eod;
    std::string expected_unfair_eod;  // 2 eps / (1 + 4 eps)
    bool fair_exact = false;
    bool unfair_exact = false;
};

struct SlopePoint {
    Hypothesis hypothesis = Hypothesis::unfair;
    double eps = 0.0;
    std::vector<double> labels;  // per run
    double mean_labels = 0.0;
};

struct LowerBoundReport {
    std::vector<LowerBoundCaseResult> cases;
    std::vector<SlopePoint> slope_points;
    std::optional<double> slope;  // UNFAIR runs, log labels against log(1/eps^2)
    std::optional<double> fair_slope;
    bool slope_in_range = false;  // slope in [0.8, 1.2]
    std::vector<ResultRow> rows;
};

// Least-squares slope of log(y) on log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

LowerBoundReport run_lower_bound_check(const ExperimentConfig& config);
Json lower_bound_report_to_json(const LowerBoundReport& report);

}  // namespace auditlab
