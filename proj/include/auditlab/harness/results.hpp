#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "auditlab/audit/blackbox.hpp"

namespace auditlab {

struct ResultRow {
    std::string algorithm;
    double sweep_value = 0.0;
    CostModel cost_pair;
    double mean_cost = 0.0;
    double std_cost = 0.0;
    double mean_labels = 0.0;
    double std_labels = 0.0;
    double mean_samples = 0.0;
    double mean_delta_hat = 0.0;
    double std_delta_hat = 0.0;
    double true_eod = 0.0;
    std::optional<double> correctness_fraction;  // empty when the row is not scored
    std::size_t n_seeds = 0;
    // Auxiliary columns.
    bool capped = false;
    bool truncated_run = false;
    bool premise_violated = false;
    double mean_label_cost = 0.0;

    bool operator==(const ResultRow&) const = default;
};

// Column order of the CSV header and of JSON objects.
const std::vector<std::string>& result_columns();

std::string format_cost_pair(const CostModel& c);
CostModel parse_cost_pair(const std::string& text);

// Per-run counters; cost is recomputed for every cost pair.
struct RunRecord {
    std::string algorithm;
    double sweep_value = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t n_label_requests = 0;
    std::uint64_t n_feature_requests = 0;
    std::uint64_t n_defaults = 0;
    std::uint64_t n_drawn = 0;
    double delta_hat = 0.0;
    Verdict verdict = Verdict::fair;
    double true_eod = 0.0;
    bool capped = false;
    bool truncated_run = false;
};

RunRecord record_from_report(const AuditReport& report, const CostLedger& ledger, double sweep_value,
                             double true_eod);

double cost_of(const RunRecord& r, const CostModel& c);
double label_cost_of(const RunRecord& r, const CostModel& c);

// Population mean and standard deviation (divisor n).
struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};
MeanStd mean_std(const std::vector<double>& values);

enum class Truth { fair, unfair, premise_violated };
// UNFAIR if eod > eps, FAIR if eod < eps / 2, otherwise the premise does not hold.
Truth ground_truth(double true_eod, double eps);

// Groups records by (algorithm, sweep_value) and emits one row per cost pair,
// sorted by (algorithm, sweep_value, cost_pair). When score is set, the
// sweep value is read as eps for ground_truth; a group with any
// premise-violating record is flagged and left unscored.
std::vector<ResultRow> aggregate(const std::vector<RunRecord>& records,
                                 const std::vector<CostModel>& cost_pairs, bool score);

void sort_rows(std::vector<ResultRow>& rows);

enum class ResultFormat { csv, json };
ResultFormat parse_result_format(const std::string& name);

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_results_json(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(std::istream& in);
std::vector<ResultRow> read_results_json(std::istream& in);

// Throws DomainError on empty rows and IoError on write failure.
void emit_results(const std::vector<ResultRow>& rows, const std::string& path, ResultFormat format);
std::vector<ResultRow> parse_results(const std::string& path, ResultFormat format);

}  // namespace auditlab
