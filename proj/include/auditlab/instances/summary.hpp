#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <variant>

#include "auditlab/instances/instance.hpp"
#include "auditlab/prob/param_set.hpp"

namespace auditlab {

// Joint cell masses indexed [y][a]: q = P[Y=y, A=a], p = P[f=1, Y=y, A=a].
struct CellMasses {
    std::array<Vector, 2> q;
    std::array<Vector, 2> p;

    explicit CellMasses(std::size_t n_groups = 0);
    std::size_t n_groups() const { return q[0].size(); }
};

struct PopulationSummary {
    std::size_t n_groups = 0;
    Vector group_probs;                 // P[A=a]
    double beta_neg_rate = 0.0;         // P[f=0]
    Vector beta_a;                      // P[f=0 | A=a]
    std::array<Vector, 2> p_joint;      // [y][a]
    std::array<Vector, 2> q_joint;
    std::array<Vector, 2> p_cond;       // P[f=1, Y=y | A=a]
    std::array<Vector, 2> q_cond;       // P[Y=y | A=a]
    std::array<std::array<double, 2>, 2> gamma{};  // [i][j] = P[f=i, Y=j]
    Vector q_min_a;
    Vector q_max_a;
    double eod = 0.0;

    // P[f=1 | Y=y, A=a]
    double acceptance(int y, std::size_t a) const { return p_joint[y][a] / q_joint[y][a]; }
};

// Throws IllPosed when some q_{y,a} = 0.
PopulationSummary summarize_cells(const CellMasses& cells);

struct ExactMode {};
struct MonteCarloMode {
    std::size_t n;
    std::uint64_t seed;
};
using SummaryMode = std::variant<ExactMode, MonteCarloMode>;

// Exact mode covers empirical instances, lower-bound instances with their own
// classifier, and Gaussian mixtures under a GroupHalfspaceClassifier.
PopulationSummary population_summary(const AuditInstance& instance, const Classifier& classifier,
                                     const SummaryMode& mode);

PopulationSummary monte_carlo_summary(const AuditInstance& instance, const Classifier& classifier,
                                      std::size_t n, RngStream& rng);

}  // namespace auditlab
