#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "auditlab/audit/trunc_est.hpp"
#include "auditlab/env/environment.hpp"
#include "auditlab/harness/results.hpp"
#include "auditlab/harness/specs.hpp"

namespace auditlab {

enum class ExperimentMode { blackbox, mixture, lower_bound_check };

const char* mode_name(ExperimentMode m);

struct CapsConfig {
    std::optional<double> tau_cap = 1000.0;
    std::optional<std::uint64_t> R_cap = 20000;
    std::uint64_t draw_cap = 10'000'000;
};

// Lower-bound parameters are kept as decimal or "a/b" text so they stay exact.
struct LowerBoundCase {
    std::string eps;
    std::string p;
    std::string q;
};

struct LowerBoundConfig {
    std::vector<LowerBoundCase> cases{{"0.1", "0.3", "0.3"}};
    std::string group1_prob = "1/2";
    Vector slope_eps{0.2, 0.1, 0.05};
    std::string slope_p = "0.3";
    std::string slope_q = "0.3";
    std::size_t runs = 2;  // seeds used per slope point, taken from the front of seeds
};

struct ExperimentConfig {
    ExperimentMode mode = ExperimentMode::blackbox;
    Json instance;
    Json classifier;
    Vector tau_sweep{5, 10, 50, 100, 200, 500, 1000};
    Vector eps_sweep{0.8, 0.5, 0.25, 0.1, 0.05, 0.01, 0.001};
    std::vector<CostModel> cost_pairs{{0.5, 0.25}, {0.5, 0.5}, {0.5, 1.0}, {0.5, 3.0}, {0.0, 1.0}};
    std::vector<std::uint64_t> seeds{1092, 42, 13, 729, 333};
    CapsConfig caps;
    // Unset: sized from the exact population summary so every cell reaches tau.
    std::optional<std::size_t> past_db_size = 200000;
    double delta = 0.1;
    std::uint64_t instance_seed = 0;
    std::uint64_t seed_offset = 0;
    unsigned threads = 0;  // 0: hardware concurrency
    std::string output_path;
    ResultFormat format = ResultFormat::csv;
    std::string base_dir;
    double eps_prime = 0.1;
    double R_log_constant = 12.0;
    TruncEstConfig trunc;
    LowerBoundConfig lower_bound;

    // Throws ConfigError on empty sweeps, duplicate seeds or out-of-range values.
    void validate() const;
};

// Unknown keys are rejected. Relative paths in the document resolve against base_dir.
ExperimentConfig parse_config(const Json& doc, const std::string& base_dir);
ExperimentConfig load_config(const std::string& path);

}  // namespace auditlab
